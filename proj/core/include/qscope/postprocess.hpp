#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qscope/generation.hpp"

namespace qscope {

struct FilterConfig {
  std::vector<std::string> banned_substrings{"preprint", "copyright"};
  std::vector<std::string> banned_publisher_names;

  void validate() const;

  /// Reads a banned-terms file: one case-insensitive term per line, blank
  /// lines and '#' comments ignored. Every term goes to banned_substrings;
  /// a `[publishers]` line switches the following terms to
  /// banned_publisher_names.
  static FilterConfig from_file(const std::string& path);

  bool bans(std::string_view question) const;
};

struct FilterResult {
  std::vector<QuestionRecord> kept;
  std::size_t dropped = 0;
};

FilterResult filter_questions(const std::vector<QuestionRecord>& records, const FilterConfig& cfg);

/// Aggregation key: lowercase, whitespace runs collapsed, trimmed. All other
/// characters, hyphens and '?' included, are preserved.
std::string normalize_question(std::string_view q);

/// Opt-in looser key: normalize_question, then hyphens become spaces and
/// trailing '?' are removed.
std::string normalize_question_aggressive(std::string_view q);

}  // namespace qscope
