#pragma once

// Small UTF-8 helpers shared by the tokenizer and the wire layer.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace proxyllm::text {

// Byte length of the code point starting at s[pos]. Malformed sequences are
// consumed one byte at a time.
std::size_t code_point_length(std::string_view s, std::size_t pos) noexcept;

std::size_t count_code_points(std::string_view s) noexcept;

// Whitespace as defined by Python's str.isspace(); returns the byte length of
// the whitespace code point at s[pos], or 0.
std::size_t whitespace_length(std::string_view s, std::size_t pos) noexcept;

// str.split() with no separator.
std::vector<std::string_view> split_whitespace(std::string_view s);

// str.strip() with no argument.
std::string_view strip_whitespace(std::string_view s) noexcept;

// ASCII-only whitespace trim used for prompts and config values.
std::string_view trim_ascii(std::string_view s) noexcept;

std::string to_lower_ascii(std::string_view s);

bool is_valid_utf8(std::string_view s) noexcept;

}  // namespace proxyllm::text
