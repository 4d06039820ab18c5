#include "bagcv/constants_file.hpp"

#include <fstream>
#include <sstream>

#include "bagcv/error.hpp"

namespace bagcv {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    kv.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv,
                      std::string_view comment) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  if (!comment.empty()) {
    std::string_view rest = comment;
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      out << "# " << rest.substr(0, nl) << '\n';
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    }
  }
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::optional<std::string> lookup(const KeyValues& kv, std::string_view key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::filesystem::path default_constants_path() { return BAGCV_CONSTANTS_PATH; }

}  // namespace bagcv
