#include "proxyllm/kv_file.hpp"

#include <fstream>
#include <istream>

#include "text_util.hpp"

namespace proxyllm {

std::map<std::string, std::string> parse_key_values(std::istream& source) {
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view trimmed = text::trim_ascii(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw KeyValueError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(text::trim_ascii(trimmed.substr(0, eq)));
    if (key.empty()) throw KeyValueError("line " + std::to_string(line_no) + ": empty key");
    std::string value(text::trim_ascii(trimmed.substr(eq + 1)));
    if (!out.emplace(key, std::move(value)).second) {
      throw KeyValueError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw KeyValueError("cannot open " + path.string());
  return parse_key_values(in);
}

}  // namespace proxyllm
