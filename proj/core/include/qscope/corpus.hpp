#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "qscope/date.hpp"

namespace qscope {

/// One corpus item. Structural breaks of the source (paragraphs, section
/// bodies) are kept as separate passages.
struct Document {
  std::string doc_id;
  std::string title;
  std::optional<Date> publish_date;
  std::vector<std::string> passages;

  bool operator==(const Document&) const = default;
};

enum class MatchMode { AnyOf, AllOf };

MatchMode parse_match_mode(std::string_view text);  // "any" | "all"

/// Date / keyword corpus filter.
///
/// A document is kept iff it has a publish date strictly after `min_date` and
/// the keyword condition holds over its title plus all passages
/// (case-insensitive substring). With no keyword terms the condition is
/// vacuously false under AnyOf and vacuously true under AllOf.
///
/// When `min_date` is unset the date condition is dropped entirely, so
/// undated documents can pass.
struct CorpusFilter {
  std::optional<Date> min_date;
  std::vector<std::string> keyword_terms;
  MatchMode match_mode = MatchMode::AnyOf;

  /// Throws InvalidArgument on an empty term.
  void validate() const;

  bool keeps(const Document& doc) const;
};

/// Input is JSON lines. `jsonl` is currently the only format id.
enum class CorpusFormat { JsonLines };

CorpusFormat parse_corpus_format(std::string_view id);

struct LoadDiagnostic {
  std::size_t line = 0;  // 1-based
  std::string message;
};

/// Streaming reader over a JSON-lines corpus file.
///
/// Each line must be an object with `doc_id` (non-empty string), `title`
/// (string), `publish_date` (`YYYY-MM-DD` or null) and `passages` (array of
/// strings). Blank lines are skipped. In lenient mode bad records are
/// recorded in diagnostics() and skipped; in strict mode they throw
/// ParseError. Duplicate doc_ids count as bad records.
class CorpusReader {
 public:
  CorpusReader(const std::string& path, bool strict = false,
               CorpusFormat format = CorpusFormat::JsonLines);

  /// Next valid document, or nullopt at end of file.
  std::optional<Document> next();

  const std::vector<LoadDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::string path_;
  std::ifstream in_;
  bool strict_;
  std::size_t line_no_ = 0;
  std::vector<LoadDiagnostic> diagnostics_;
  std::vector<std::string> seen_ids_;  // sorted
};

struct LoadResult {
  std::vector<Document> documents;
  std::vector<LoadDiagnostic> diagnostics;
};

LoadResult load_corpus(const std::string& path, bool strict = false,
                       CorpusFormat format = CorpusFormat::JsonLines);

/// Order-preserving subsequence of `docs` kept by `filter`.
std::vector<Document> filter_corpus(const std::vector<Document>& docs,
                                    const CorpusFilter& filter);

/// Serialises one document as a single JSON line (no trailing newline).
std::string to_json_line(const Document& doc);

void write_corpus(const std::string& path, const std::vector<Document>& docs);

}  // namespace qscope
