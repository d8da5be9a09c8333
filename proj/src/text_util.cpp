#include "text_util.hpp"

#include <cstdint>

namespace proxyllm::text {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Decodes the code point at pos; returns 0xFFFFFFFF for malformed input.
std::uint32_t decode(std::string_view s, std::size_t pos, std::size_t len) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  if (len == 1) return lead < 0x80 ? lead : 0xFFFFFFFFu;
  std::uint32_t cp = lead & (0x7F >> len);
  for (std::size_t i = 1; i < len; ++i) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[pos + i]) & 0x3F);
  }
  return cp;
}

bool is_python_space(std::uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x1C: case 0x1D: case 0x1E: case 0x1F: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

}  // namespace

std::size_t code_point_length(std::string_view s, std::size_t pos) noexcept {
  const auto lead = static_cast<unsigned char>(s[pos]);
  std::size_t len = 1;
  if (lead >= 0xF0 && lead <= 0xF4) {
    len = 4;
  } else if (lead >= 0xE0) {
    len = lead <= 0xEF ? 3 : 1;
  } else if (lead >= 0xC2) {
    len = 2;
  }
  if (pos + len > s.size()) return 1;
  for (std::size_t i = 1; i < len; ++i) {
    if (!is_continuation(static_cast<unsigned char>(s[pos + i]))) return 1;
  }
  return len;
}

std::size_t count_code_points(std::string_view s) noexcept {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); pos += code_point_length(s, pos)) ++n;
  return n;
}

std::size_t whitespace_length(std::string_view s, std::size_t pos) noexcept {
  const std::size_t len = code_point_length(s, pos);
  return is_python_space(decode(s, pos, len)) ? len : 0;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < s.size()) {
    const std::size_t ws = whitespace_length(s, pos);
    if (ws > 0) {
      if (start != std::string_view::npos) {
        out.push_back(s.substr(start, pos - start));
        start = std::string_view::npos;
      }
      pos += ws;
    } else {
      if (start == std::string_view::npos) start = pos;
      pos += code_point_length(s, pos);
    }
  }
  if (start != std::string_view::npos) out.push_back(s.substr(start));
  return out;
}

std::string_view strip_whitespace(std::string_view s) noexcept {
  std::size_t begin = 0;
  while (begin < s.size()) {
    const std::size_t ws = whitespace_length(s, begin);
    if (ws == 0) break;
    begin += ws;
  }
  // Walk forward remembering the end of the last non-space code point.
  std::size_t end = begin;
  for (std::size_t pos = begin; pos < s.size();) {
    const std::size_t ws = whitespace_length(s, pos);
    if (ws > 0) {
      pos += ws;
    } else {
      pos += code_point_length(s, pos);
      end = pos;
    }
  }
  return s.substr(begin, end - begin);
}

std::string_view trim_ascii(std::string_view s) noexcept {
  constexpr std::string_view kSpace = " \t\r\n\v\f";
  const auto begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(kSpace);
  return s.substr(begin, end - begin + 1);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_valid_utf8(std::string_view s) noexcept {
  for (std::size_t pos = 0; pos < s.size();) {
    const auto lead = static_cast<unsigned char>(s[pos]);
    const std::size_t len = code_point_length(s, pos);
    if (len == 1 && lead >= 0x80) return false;
    if (len > 1) {
      const std::uint32_t cp = decode(s, pos, len);
      const bool overlong = (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
      if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    }
    pos += len;
  }
  return true;
}

}  // namespace proxyllm::text
