#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>

namespace qscope {

using StopwordSet = std::unordered_set<std::string>;

/// The shipped English stopword list, sorted, lowercase, one entry per word.
std::span<const std::string_view> english_stopword_list();

/// FNV-1a 64 over the shipped list joined by '\n'. Pinned in tests so that a
/// silent edit to the list (and thus to every vocabulary) is caught.
std::uint64_t english_stopword_checksum();

const StopwordSet& english_stopwords();

/// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet load_stopwords(const std::string& path);

}  // namespace qscope
