#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace proxyllm {

class KeyValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses `key = value` lines. Blank lines and lines starting with `#` are
// ignored; the value is everything after the first '=' with surrounding
// whitespace trimmed. Duplicate keys and lines without '=' are errors.
std::map<std::string, std::string> parse_key_values(std::istream& source);
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

}  // namespace proxyllm
