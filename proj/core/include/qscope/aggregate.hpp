#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qscope/date.hpp"
#include "qscope/generation.hpp"

namespace qscope {

/// span_count: records producing the question. doc_count: distinct doc_ids.
struct FrequencyEntry {
  std::string question;
  std::size_t span_count = 0;
  std::size_t doc_count = 0;

  bool operator==(const FrequencyEntry&) const = default;
};

/// Commutative-monoid accumulator behind count_frequencies. Shards can be
/// counted independently and merged in any order.
class FrequencyCounter {
 public:
  void add(const QuestionRecord& record);
  void add(const std::string& question, const std::string& doc_id);
  FrequencyCounter& merge(const FrequencyCounter& other);

  std::size_t total_records() const { return total_; }
  std::size_t unique_questions() const { return counts_.size(); }

  /// Sorted by span_count descending, then question ascending.
  std::vector<FrequencyEntry> entries() const;

 private:
  struct Tally {
    std::size_t spans = 0;
    std::set<std::string> docs;
  };
  std::map<std::string, Tally> counts_;
  std::size_t total_ = 0;
};

std::vector<FrequencyEntry> count_frequencies(const std::vector<QuestionRecord>& records);

/// Keeps entries with doc_count >= min_docs, order preserved.
std::vector<FrequencyEntry> filter_by_doc_frequency(const std::vector<FrequencyEntry>& entries,
                                                    std::size_t min_docs);

enum class GroupMatch {
  Literal,  // case-insensitive substring
  Stem,     // word-bounded match after stripping plural endings
};

using KeywordGroups = std::map<std::string, std::vector<std::string>>;

struct MonthCount {
  YearMonth month;
  std::size_t count = 0;

  bool operator==(const MonthCount&) const = default;
};

struct TimeBucketSeries {
  std::string label;
  std::vector<MonthCount> buckets;  // strictly increasing, gap-free
  std::size_t undated = 0;

  bool operator==(const TimeBucketSeries&) const = default;
};

/// Per group, counts records whose question contains any of the group's
/// phrases, bucketed by publication month. All series share one month range
/// (first to last month among dated records), zero-filled. Records without a
/// date go to each matching group's `undated` counter. A record matching
/// several groups counts once in each. Series come out in label order.
std::vector<TimeBucketSeries> keyword_group_series(const std::vector<QuestionRecord>& records,
                                                   const KeywordGroups& groups,
                                                   GroupMatch mode = GroupMatch::Literal);

bool group_phrase_matches(const std::string& question, const std::string& phrase,
                          GroupMatch mode);

KeywordGroups load_keyword_groups(const std::string& path);  // {"label": ["phrase", ...]}

/// CSV `rank,question,span_count,doc_count`; ranks are 1-based.
void write_frequency_csv(const std::string& path, const std::vector<FrequencyEntry>& entries);
std::vector<FrequencyEntry> read_frequency_csv(const std::string& path);

/// CSV `group,month,count`; undated counts, when non-zero, follow each
/// group's dated rows with month `undated`.
void write_series_csv(const std::string& path, const std::vector<TimeBucketSeries>& series);

}  // namespace qscope
