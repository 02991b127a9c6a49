#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qscope/corpus.hpp"

namespace qscope {

/// A contiguous window of sentences of one document.
/// Invariants: sentence_start < sentence_end, width <= window size, text
/// non-empty.
struct SentenceSpan {
  std::string doc_id;
  std::size_t span_index = 0;
  std::size_t sentence_start = 0;
  std::size_t sentence_end = 0;  // exclusive
  std::string text;

  bool operator==(const SentenceSpan&) const = default;
};

struct WindowConfig {
  std::size_t window_size = 10;
  std::size_t stride = 5;
  std::size_t min_sentences_per_passage = 2;

  /// Throws InvalidArgument unless window_size >= 1 and 1 <= stride <= window_size.
  void validate() const;
};

/// Removes e-mail addresses, URLs, DOIs, bracketed numeric citation tags and
/// leading section numbers, then collapses whitespace. Rules are applied
/// until nothing changes, so the function is idempotent.
std::string clean_text(std::string_view raw);

class SentenceSplitter {
 public:
  virtual ~SentenceSplitter() = default;
  virtual std::vector<std::string> split(std::string_view text) const = 0;
};

/// Splits after '.', '?' or '!' (optionally followed by closing quotes or
/// brackets) when whitespace and then an uppercase letter or digit follow,
/// possibly behind opening quotes or brackets.
/// A '.' does not split after a known abbreviation ("Fig.", "et al.", "e.g.",
/// ...) or after a single-letter token ("J. Smith").
class RuleSentenceSplitter final : public SentenceSplitter {
 public:
  std::vector<std::string> split(std::string_view text) const override;
};

std::vector<std::string> split_sentences(std::string_view text);

/// Half-open sentence ranges [start, end) of the windows over `n` sentences.
/// Empty when n < min_sentences_per_passage. Windows start at multiples of
/// the stride; emission stops after the first window reaching the end.
std::vector<std::pair<std::size_t, std::size_t>> window_ranges(std::size_t n,
                                                               const WindowConfig& cfg);

std::vector<SentenceSpan> window_spans(const std::vector<std::string>& sentences,
                                       const WindowConfig& cfg,
                                       const std::string& doc_id);

/// Cleans and splits every passage, drops passages with fewer than
/// min_sentences_per_passage sentences, concatenates the rest in order and
/// windows the result at document scale.
std::vector<SentenceSpan> document_spans(const Document& doc, const WindowConfig& cfg,
                                         const SentenceSplitter& splitter);

std::string to_json_line(const SentenceSpan& span);
SentenceSpan span_from_json_line(std::string_view line);

void write_spans(const std::string& path, const std::vector<SentenceSpan>& spans);
std::vector<SentenceSpan> read_spans(const std::string& path);

}  // namespace qscope
