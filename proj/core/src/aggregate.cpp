#include "qscope/aggregate.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "qscope/csv.hpp"
#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

void FrequencyCounter::add(const QuestionRecord& record) { add(record.question, record.doc_id); }

void FrequencyCounter::add(const std::string& question, const std::string& doc_id) {
  auto& tally = counts_[question];
  ++tally.spans;
  tally.docs.insert(doc_id);
  ++total_;
}

FrequencyCounter& FrequencyCounter::merge(const FrequencyCounter& other) {
  for (const auto& [question, theirs] : other.counts_) {
    auto& mine = counts_[question];
    mine.spans += theirs.spans;
    mine.docs.insert(theirs.docs.begin(), theirs.docs.end());
  }
  total_ += other.total_;
  return *this;
}

std::vector<FrequencyEntry> FrequencyCounter::entries() const {
  std::vector<FrequencyEntry> out;
  out.reserve(counts_.size());
  for (const auto& [question, tally] : counts_) {
    out.push_back({question, tally.spans, tally.docs.size()});
  }
  // counts_ iterates in question order, so a stable sort on span_count
  // leaves ties ascending by question.
  std::stable_sort(out.begin(), out.end(), [](const FrequencyEntry& a, const FrequencyEntry& b) {
    return a.span_count > b.span_count;
  });
  return out;
}

std::vector<FrequencyEntry> count_frequencies(const std::vector<QuestionRecord>& records) {
  FrequencyCounter counter;
  for (const auto& r : records) counter.add(r);
  return counter.entries();
}

std::vector<FrequencyEntry> filter_by_doc_frequency(const std::vector<FrequencyEntry>& entries,
                                                    std::size_t min_docs) {
  if (min_docs < 1) throw InvalidArgument("min_docs must be >= 1");
  std::vector<FrequencyEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [min_docs](const FrequencyEntry& e) { return e.doc_count >= min_docs; });
  return out;
}

namespace {

// Plural stripping: "treatments" -> "treatment", "therapies" -> "therapy".
std::string strip_plural(std::string word) {
  auto ends_with = [&word](std::string_view suffix) {
    return word.size() >= suffix.size() &&
           word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (word.size() > 4 && ends_with("ies")) {
    word.replace(word.size() - 3, 3, "y");
  } else if (word.size() > 4 && (ends_with("ses") || ends_with("xes") || ends_with("zes") ||
                                 ends_with("ches") || ends_with("shes"))) {
    word.resize(word.size() - 2);
  } else if (word.size() > 3 && ends_with("s") && !ends_with("ss") && !ends_with("us")) {
    word.pop_back();
  }
  return word;
}

std::vector<std::string> stemmed_tokens(std::string_view text) {
  auto tokens = word_tokens(text);
  for (auto& t : tokens) t = strip_plural(std::move(t));
  return tokens;
}

}  // namespace

bool group_phrase_matches(const std::string& question, const std::string& phrase, GroupMatch mode) {
  if (mode == GroupMatch::Literal) return contains_icase(question, phrase);
  auto needle = stemmed_tokens(phrase);
  if (needle.empty()) return false;
  auto hay = stemmed_tokens(question);
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::vector<TimeBucketSeries> keyword_group_series(const std::vector<QuestionRecord>& records,
                                                   const KeywordGroups& groups, GroupMatch mode) {
  std::optional<YearMonth> first, last;
  for (const auto& r : records) {
    if (!r.publish_date) continue;
    auto m = YearMonth::of(*r.publish_date);
    if (!first || m < *first) first = m;
    if (!last || *last < m) last = m;
  }
  std::vector<YearMonth> months;
  if (first) {
    for (auto m = *first; m <= *last; m = m.next()) months.push_back(m);
  }

  std::vector<TimeBucketSeries> out;
  for (const auto& [label, phrases] : groups) {
    TimeBucketSeries series;
    series.label = label;
    if (records.empty()) {
      out.push_back(std::move(series));
      continue;
    }
    for (const auto& m : months) series.buckets.push_back({m, 0});
    for (const auto& r : records) {
      bool hit = std::any_of(phrases.begin(), phrases.end(), [&](const std::string& p) {
        return group_phrase_matches(r.question, p, mode);
      });
      if (!hit) continue;
      if (!r.publish_date) {
        ++series.undated;
        continue;
      }
      auto m = YearMonth::of(*r.publish_date);
      auto it = std::lower_bound(series.buckets.begin(), series.buckets.end(), m,
                                 [](const MonthCount& b, const YearMonth& v) { return b.month < v; });
      ++it->count;
    }
    out.push_back(std::move(series));
  }
  return out;
}

KeywordGroups load_keyword_groups(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open keyword groups file: " + path);
  KeywordGroups groups;
  try {
    auto j = nlohmann::json::parse(in);
    if (!j.is_object()) throw ParseError("keyword groups must be a JSON object");
    for (const auto& [label, phrases] : j.items()) {
      auto& list = groups[label];
      if (phrases.is_string()) {
        list.push_back(phrases.get<std::string>());
        continue;
      }
      for (const auto& p : phrases) list.push_back(p.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  for (const auto& [label, phrases] : groups) {
    if (phrases.empty()) throw ParseError(path + ": group '" + label + "' has no phrases");
    for (const auto& p : phrases) {
      if (trim(p).empty()) throw ParseError(path + ": group '" + label + "' has an empty phrase");
    }
  }
  return groups;
}

void write_frequency_csv(const std::string& path, const std::vector<FrequencyEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write frequency table: " + path);
  csv::write_row(out, {"rank", "question", "span_count", "doc_count"});
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    csv::write_row(out, {std::to_string(i + 1), e.question, std::to_string(e.span_count),
                         std::to_string(e.doc_count)});
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<FrequencyEntry> read_frequency_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open frequency table: " + path);
  std::vector<std::string> row;
  if (!csv::read_row(in, row) || row != std::vector<std::string>{"rank", "question", "span_count",
                                                                  "doc_count"}) {
    throw ParseError(path + ": expected header rank,question,span_count,doc_count");
  }
  std::vector<FrequencyEntry> out;
  std::size_t line = 1;
  while (csv::read_row(in, row)) {
    ++line;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 4) throw ParseError(path + ":" + std::to_string(line) + ": expected 4 fields");
    try {
      out.push_back({row[1], std::stoul(row[2]), std::stoul(row[3])});
    } catch (const std::logic_error&) {
      throw ParseError(path + ":" + std::to_string(line) + ": bad count");
    }
  }
  return out;
}

void write_series_csv(const std::string& path, const std::vector<TimeBucketSeries>& series) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write series table: " + path);
  csv::write_row(out, {"group", "month", "count"});
  for (const auto& s : series) {
    for (const auto& b : s.buckets) {
      csv::write_row(out, {s.label, b.month.to_string(), std::to_string(b.count)});
    }
    if (s.undated > 0) csv::write_row(out, {s.label, "undated", std::to_string(s.undated)});
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace qscope
