#include "qscope/postprocess.hpp"

#include <algorithm>
#include <fstream>

#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

void FilterConfig::validate() const {
  for (const auto* list : {&banned_substrings, &banned_publisher_names}) {
    for (const auto& term : *list) {
      if (term.empty()) throw InvalidArgument("filter config: empty banned term");
    }
  }
}

FilterConfig FilterConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open banned-terms file: " + path);
  FilterConfig cfg;
  cfg.banned_substrings.clear();
  cfg.banned_publisher_names.clear();
  auto* target = &cfg.banned_substrings;
  std::string line;
  while (std::getline(in, line)) {
    auto term = trim(line);
    if (term.empty() || term.front() == '#') continue;
    if (term == "[publishers]") {
      target = &cfg.banned_publisher_names;
      continue;
    }
    if (term == "[terms]") {
      target = &cfg.banned_substrings;
      continue;
    }
    target->emplace_back(term);
  }
  return cfg;
}

bool FilterConfig::bans(std::string_view question) const {
  auto hit = [question](const std::string& term) { return contains_icase(question, term); };
  return std::any_of(banned_substrings.begin(), banned_substrings.end(), hit) ||
         std::any_of(banned_publisher_names.begin(), banned_publisher_names.end(), hit);
}

FilterResult filter_questions(const std::vector<QuestionRecord>& records, const FilterConfig& cfg) {
  cfg.validate();
  FilterResult result;
  for (const auto& r : records) {
    if (cfg.bans(r.question)) {
      ++result.dropped;
    } else {
      result.kept.push_back(r);
    }
  }
  return result;
}

std::string normalize_question(std::string_view q) { return ascii_lower(collapse_whitespace(q)); }

std::string normalize_question_aggressive(std::string_view q) {
  std::string s = normalize_question(q);
  std::replace(s.begin(), s.end(), '-', ' ');
  s = collapse_whitespace(s);
  while (!s.empty() && s.back() == '?') s.pop_back();
  return std::string(trim(s));
}

}  // namespace qscope
