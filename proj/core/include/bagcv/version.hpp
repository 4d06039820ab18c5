#pragma once

namespace bagcv {

/// Library version, "major.minor.patch".
const char* version() noexcept;

}  // namespace bagcv
