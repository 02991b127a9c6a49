#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qscope/date.hpp"
#include "qscope/preprocess.hpp"

namespace qscope {

struct GenerationConfig {
  int beams = 4;
  int max_question_tokens = 64;
  int questions_per_span = 1;
  std::string endpoint;  // remote backend only
  std::size_t batch_size = 16;
  std::size_t max_inflight_requests = 1;
  // Attempts after the first one, per batch and per single-span fallback.
  int max_retries = 2;

  void validate() const;
};

/// One generated question with the provenance of the span it came from.
struct QuestionRecord {
  std::string question;
  std::string doc_id;
  std::size_t span_index = 0;
  std::optional<Date> publish_date;
  std::string backend_id;

  bool operator==(const QuestionRecord&) const = default;
};

/// Body of a `/generate` call; mirrors the wire request.
struct GenerationRequest {
  std::vector<std::string> texts;
  int beams = 4;
  int max_tokens = 64;
  int num_return = 1;
};

/// A question generator. Implementations must tolerate concurrent calls.
/// The result is parallel to request.texts.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string id() const = 0;
  virtual std::vector<std::vector<std::string>> generate(const GenerationRequest& request) = 0;
};

inline constexpr std::string_view kMockFallbackQuestion = "what is this text about";

/// "what is " + the most frequent non-stopword unigram of the lowercased
/// text (ties: lexicographically smallest). Stopword-only text yields
/// kMockFallbackQuestion.
std::string mock_generate(std::string_view span_text);

/// Deterministic offline backend built on mock_generate. Every requested
/// return slot carries the same question.
class MockGenerationBackend final : public GenerationBackend {
 public:
  std::string id() const override { return "mock"; }
  std::vector<std::vector<std::string>> generate(const GenerationRequest& request) override;
};

/// HTTP client for `POST {endpoint}/generate`.
///
/// Request  {"texts": [...], "beams": n, "max_tokens": n, "num_return": n}
/// Response {"questions": [[...], ...]}, outer list parallel to texts.
///
/// Connection failures throw BackendUnavailable; non-200 statuses and
/// malformed bodies throw BackendError.
class RemoteGenerationBackend final : public GenerationBackend {
 public:
  explicit RemoteGenerationBackend(std::string endpoint, double timeout_seconds = 300.0);
  std::string id() const override { return "remote:" + endpoint_; }
  std::vector<std::vector<std::string>> generate(const GenerationRequest& request) override;

 private:
  std::string endpoint_;
  double timeout_seconds_;
};

std::string encode_generate_request(const GenerationRequest& request);
std::vector<std::vector<std::string>> decode_generate_response(std::string_view body);

struct SpanFailure {
  std::string doc_id;
  std::size_t span_index = 0;
  std::string message;
};

struct GenerationSummary {
  std::size_t spans = 0;
  std::size_t records = 0;
  std::size_t backend_calls = 0;
  std::size_t retries = 0;
  std::vector<SpanFailure> failures;

  /// Associative merge; failures concatenate in argument order.
  GenerationSummary& merge(const GenerationSummary& other);
};

using DateLookup = std::function<std::optional<Date>(const std::string& doc_id)>;
using RecordSink = std::function<void(QuestionRecord&&)>;

/// Generates questions_per_span questions for every span. Batches of
/// batch_size spans are sent with at most max_inflight_requests calls in
/// flight; records reach `sink` in input order regardless of completion
/// order.
///
/// A failing batch is retried, then retried span by span; a span that still
/// fails (or yields blank questions) is skipped and listed in the summary.
/// BackendUnavailable escaping the retry budget aborts the run.
GenerationSummary generate(const std::vector<SentenceSpan>& spans, const GenerationConfig& cfg,
                           GenerationBackend& backend, const DateLookup& dates,
                           const RecordSink& sink);

struct GenerationResult {
  std::vector<QuestionRecord> records;
  GenerationSummary summary;
};

GenerationResult generate(const std::vector<SentenceSpan>& spans, const GenerationConfig& cfg,
                          GenerationBackend& backend, const DateLookup& dates = {});

std::string to_json_line(const QuestionRecord& record);
QuestionRecord question_from_json_line(std::string_view line);

void write_questions(const std::string& path, const std::vector<QuestionRecord>& records);
std::vector<QuestionRecord> read_questions(const std::string& path);

}  // namespace qscope
