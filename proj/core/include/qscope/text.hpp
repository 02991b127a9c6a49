#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qscope {

// ASCII-only case folding. Non-ASCII bytes (UTF-8 continuation bytes
// included) pass through untouched, so folding never breaks an encoding.
std::string ascii_lower(std::string_view s);

bool contains_icase(std::string_view haystack, std::string_view needle);

// Collapses every run of whitespace to one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

std::string_view trim(std::string_view s);

// Lowercased maximal runs of ASCII alphanumerics. Everything else separates.
std::vector<std::string> word_tokens(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

// Joins with `sep`; the inverse of split for inputs without `sep`.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace qscope
