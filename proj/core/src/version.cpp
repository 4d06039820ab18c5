#include "bagcv/version.hpp"

namespace bagcv {

const char* version() noexcept { return BAGCV_VERSION; }

}  // namespace bagcv
