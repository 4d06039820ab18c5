#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bagcv {

/// Ordered key=value pairs. Blank lines and lines starting with '#' are
/// comments.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text);
/// Throws ConfigError when the file cannot be read or a line lacks '='.
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv,
                      std::string_view comment = {});
std::optional<std::string> lookup(const KeyValues& kv, std::string_view key);

/// Source-tree location of the kernel constants file the library was built from.
std::filesystem::path default_constants_path();

}  // namespace bagcv
