#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "bagcv/sample.hpp"

namespace bagcv::cli {

enum ExitCode : int { ok = 0, usage = 2, data = 3, numerical = 4 };

struct Ingested {
  Sample sample;
  std::size_t ties_before_jitter = 0;
};

/// Reads one numeric column from a newline or comma separated file. `column`
/// is a header name or a 0-based index ("" = first column); a first line whose
/// selected field is not numeric is taken as a header. Jitter j > 0 adds
/// Uniform(-j, j) noise drawn from `seed`.
Ingested ingest(const std::filesystem::path& path, const std::string& column, double jitter,
                std::optional<std::uint64_t> seed);

/// Full command line, returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bagcv::cli
