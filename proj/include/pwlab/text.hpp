#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pwlab::text {

/// ASCII lowercase; non-ASCII bytes pass through.
std::string to_lower(std::string_view s);

/// Lowercases and collapses runs of whitespace to a single space, trimming
/// both ends. This is the normal form phrase matching runs on.
std::string normalize(std::string_view s);

std::string trim(std::string_view s);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

bool contains_nul(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::vector<std::string> split(std::string_view s, char sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Lowercase hex of `value`, zero-padded to 16 chars.
std::string hex64(unsigned long long value);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace pwlab::text
