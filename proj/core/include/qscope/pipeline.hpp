#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qscope/aggregate.hpp"
#include "qscope/corpus.hpp"
#include "qscope/embedding.hpp"
#include "qscope/generation.hpp"
#include "qscope/manifest.hpp"
#include "qscope/preprocess.hpp"

namespace qscope {

/// Every knob of a full run. Serialises to the JSON config file accepted by
/// `qscope run --config`.
struct PipelineConfig {
  std::string input;
  std::string workdir = "qscope-run";
  bool strict = false;

  std::optional<Date> min_date;
  std::vector<std::string> terms;
  MatchMode match_mode = MatchMode::AnyOf;

  WindowConfig window;

  std::string backend = "mock";  // mock | remote
  GenerationConfig generation;

  std::optional<std::string> banned_terms_path;
  bool aggressive_normalization = false;

  std::size_t top = 1000;  // rows in frequent.csv; 0 keeps all
  std::size_t min_docs = 3;

  KeywordGroups groups;
  GroupMatch group_match = GroupMatch::Literal;

  std::optional<std::string> gold_path;  // enables the frequent-question sheet
  std::string embedder = "stub";         // stub | remote
  std::string embed_endpoint;
  std::size_t k = 3;

  std::uint64_t seed = 13;

  std::string to_json() const;
  static PipelineConfig from_json(std::string_view text);
  static PipelineConfig from_file(const std::string& path);

  /// Replaces endpoints from QSCOPE_GENERATE_ENDPOINT / QSCOPE_EMBED_ENDPOINT
  /// when those are set.
  void apply_environment();
  void validate() const;

  /// Filter used by the ingest stage, or nullopt when neither a date nor
  /// terms were given. Date-only filtering switches to all-of so that the
  /// empty term list is vacuously satisfied.
  std::optional<CorpusFilter> corpus_filter() const;
};

/// Stage order of a run. Later stages read the files earlier ones wrote.
inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> stages{"ingest",    "spans",      "generate", "postprocess",
                                               "aggregate", "timeseries", "match"};
  return stages;
}

namespace files {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kSpans = "spans.jsonl";
inline constexpr const char* kRawQuestions = "questions.raw.jsonl";
inline constexpr const char* kCleanQuestions = "questions.clean.jsonl";
inline constexpr const char* kFrequencies = "frequencies.csv";
inline constexpr const char* kFrequent = "frequent.csv";
inline constexpr const char* kSeries = "series.csv";
inline constexpr const char* kSheet = "frequent_sheet.csv";
}  // namespace files

struct PipelineOptions {
  /// Stop cleanly after this stage (simulates an interrupted run).
  std::optional<std::string> stop_after;
  /// Ignore existing checkpoints and recompute every stage.
  bool fresh = false;
  /// Test seams; when null the config decides.
  GenerationBackend* generation_backend = nullptr;
  EmbeddingBackend* embedding_backend = nullptr;
};

struct PipelineOutcome {
  int exit_code = 0;
  RunManifest manifest;
  std::string error;
};

/// ingest -> spans -> generate -> postprocess -> aggregate [-> timeseries]
/// [-> match]. Each stage writes its artifact atomically and records counts
/// in workdir/manifest.json. A rerun with an identical configuration reuses
/// completed stages whose artifacts still exist.
PipelineOutcome run_pipeline(const PipelineConfig& config, const PipelineOptions& options = {});

}  // namespace qscope
