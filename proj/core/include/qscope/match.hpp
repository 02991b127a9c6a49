#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qscope/aggregate.hpp"
#include "qscope/embedding.hpp"
#include "qscope/generation.hpp"

namespace qscope {

struct MatchScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Greedy token matching on unit vectors. Recall averages, over reference
/// tokens, the best cosine to any candidate token; precision does the same
/// over candidate tokens. F1 is their harmonic mean, 0 when P + R <= 0.
MatchScores bertscore(const TokenEmbeddingSeq& reference, const TokenEmbeddingSeq& candidate);

struct MatchCandidate {
  std::string reference;
  std::string candidate;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Top-k candidates by F1 descending, ties by candidate text ascending.
/// Throws InvalidArgument when k == 0 or candidates is empty.
std::vector<MatchCandidate> rank_candidates(const std::string& reference,
                                            const std::vector<std::string>& candidates,
                                            EmbeddingBackend& embedder, std::size_t k);

enum class MatchLabel { Unset, Strong, Weak, None };

std::string_view to_string(MatchLabel label);
MatchLabel parse_match_label(std::string_view text);  // "" and "unset" both mean Unset

struct ScoredCandidate {
  std::string text;
  double f1 = 0.0;

  bool operator==(const ScoredCandidate&) const = default;
};

/// One reference question with its top-ranked generated candidates.
/// `context` is a doc_id (per-document experiment) or "corpus".
/// `label` is the best match among the row's candidates.
struct SheetRow {
  std::string reference;
  std::string context;
  std::vector<ScoredCandidate> candidates;  // at most 3 in the CSV form
  MatchLabel label = MatchLabel::Unset;

  bool operator==(const SheetRow&) const = default;
};

struct AnnotationSheet {
  std::vector<SheetRow> rows;
};

inline constexpr std::string_view kCorpusContext = "corpus";

/// Header `reference,context,cand1,f1_1,cand2,f1_2,cand3,f1_3,label`,
/// preceded by '#' lines documenting the labels.
void write_sheet(const std::string& path, const AnnotationSheet& sheet);
AnnotationSheet read_sheet(const std::string& path);

struct GoldPair {
  std::string reference;
  std::string doc_id;
};

/// Gold file: JSON lines `{"question": ..., "doc_id": ...}`; doc_id is
/// optional for the frequent-question experiment.
std::vector<GoldPair> read_gold(const std::string& path);

struct ExcludedRow {
  std::string reference;
  std::string context;
  std::string reason;
};

struct ExperimentOptions {
  std::size_t k = 3;
  /// When set, finished rows are appended here as they complete and rows
  /// already present are reused, so a failed run resumes where it stopped.
  std::optional<std::string> checkpoint_path;
};

struct ExperimentResult {
  AnnotationSheet sheet;
  std::vector<ExcludedRow> excluded;
};

/// One row per (reference, doc_id); candidates are that document's distinct
/// generated questions. Gold documents without generated questions are
/// excluded and reported.
ExperimentResult per_document_experiment(const std::vector<GoldPair>& gold,
                                         const std::vector<QuestionRecord>& questions,
                                         EmbeddingBackend& embedder,
                                         const ExperimentOptions& options = {});

/// One row per reference; candidates come from the frequent-question list.
/// Throws InvalidArgument when `frequent` is empty.
ExperimentResult frequent_question_experiment(const std::vector<std::string>& gold,
                                              const std::vector<FrequencyEntry>& frequent,
                                              EmbeddingBackend& embedder,
                                              const ExperimentOptions& options = {});

struct Fraction {
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  double value() const {
    return denominator == 0 ? 0.0 : static_cast<double>(numerator) / denominator;
  }
  /// Nearest integer percent, halves rounded up; 0 for an empty denominator.
  std::size_t percent() const;
};

struct AnnotationSummary {
  std::size_t total = 0;
  std::size_t strong = 0;
  std::size_t weak = 0;
  std::size_t none = 0;
  std::size_t match = 0;  // strong + weak

  Fraction strong_share() const { return {strong, total}; }
  Fraction weak_share() const { return {weak, total}; }
  Fraction none_share() const { return {none, total}; }
  Fraction match_share() const { return {match, total}; }

  /// e.g. "total 27, match 13 (48%), strong 8 (30%), weak 5 (19%), none 14 (52%)"
  std::string display() const;
  /// Machine-readable form with exact numerators and denominators.
  std::string to_json() const;
};

/// Throws InvalidArgument listing the 1-based row numbers still unset.
AnnotationSummary summarize_annotations(const AnnotationSheet& sheet);

}  // namespace qscope
