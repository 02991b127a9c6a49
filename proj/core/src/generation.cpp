#include "qscope/generation.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "http_client.hpp"
#include "qscope/error.hpp"
#include "qscope/stopwords.hpp"
#include "qscope/text.hpp"

namespace qscope {

using nlohmann::json;

void GenerationConfig::validate() const {
  if (beams < 1) throw InvalidArgument("beams must be >= 1");
  if (max_question_tokens < 1) throw InvalidArgument("max question tokens must be >= 1");
  if (questions_per_span < 1) throw InvalidArgument("questions per span must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
  if (max_inflight_requests < 1) throw InvalidArgument("max in-flight requests must be >= 1");
  if (max_retries < 0) throw InvalidArgument("max retries must be >= 0");
}

std::string mock_generate(std::string_view span_text) {
  const auto& stop = english_stopwords();
  std::map<std::string, std::size_t> counts;
  for (auto& tok : word_tokens(span_text)) {
    if (!stop.contains(tok)) ++counts[tok];
  }
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [tok, n] : counts) {
    if (n > best_count) {
      best = &tok;
      best_count = n;
    }
  }
  if (!best) return std::string(kMockFallbackQuestion);
  return "what is " + *best;
}

std::vector<std::vector<std::string>> MockGenerationBackend::generate(
    const GenerationRequest& request) {
  std::vector<std::vector<std::string>> out;
  out.reserve(request.texts.size());
  for (const auto& text : request.texts) {
    out.emplace_back(static_cast<std::size_t>(std::max(request.num_return, 1)), mock_generate(text));
  }
  return out;
}

std::string encode_generate_request(const GenerationRequest& request) {
  json j;
  j["texts"] = request.texts;
  j["beams"] = request.beams;
  j["max_tokens"] = request.max_tokens;
  j["num_return"] = request.num_return;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<std::vector<std::string>> decode_generate_response(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw BackendError(std::string("generate: response is not JSON: ") + e.what());
  }
  auto q = j.find("questions");
  if (!j.is_object() || q == j.end() || !q->is_array()) {
    throw BackendError("generate: response lacks a 'questions' array");
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& per_text : *q) {
    if (!per_text.is_array()) throw BackendError("generate: 'questions' entries must be arrays");
    auto& row = out.emplace_back();
    for (const auto& s : per_text) {
      if (!s.is_string()) throw BackendError("generate: questions must be strings");
      row.push_back(s.get<std::string>());
    }
  }
  return out;
}

RemoteGenerationBackend::RemoteGenerationBackend(std::string endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {
  if (endpoint_.empty()) throw InvalidArgument("remote generation backend needs an endpoint");
}

std::vector<std::vector<std::string>> RemoteGenerationBackend::generate(
    const GenerationRequest& request) {
  auto body = detail::post_json(endpoint_, "/generate", encode_generate_request(request),
                                timeout_seconds_);
  return decode_generate_response(body);
}

GenerationSummary& GenerationSummary::merge(const GenerationSummary& other) {
  spans += other.spans;
  records += other.records;
  backend_calls += other.backend_calls;
  retries += other.retries;
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
  return *this;
}

namespace {

struct BatchOutcome {
  std::vector<QuestionRecord> records;
  GenerationSummary summary;
};

class BatchRunner {
 public:
  BatchRunner(const GenerationConfig& cfg, GenerationBackend& backend, const DateLookup& dates)
      : cfg_(cfg), backend_(backend), dates_(dates), backend_id_(backend.id()) {}

  BatchOutcome run(const SentenceSpan* first, std::size_t count) const {
    BatchOutcome out;
    out.summary.spans = count;
    // nullopt: the span already has a recorded failure.
    std::vector<std::optional<std::vector<std::string>>> answers(count);
    try {
      auto batch = call(first, count, out.summary);
      for (std::size_t i = 0; i < count; ++i) answers[i] = std::move(batch[i]);
    } catch (const BackendUnavailable&) {
      throw;
    } catch (const std::exception&) {
      // The batch as a whole is unusable; isolate the failing spans.
      for (std::size_t i = 0; i < count; ++i) {
        try {
          answers[i] = std::move(call(first + i, 1, out.summary).front());
        } catch (const BackendUnavailable&) {
          throw;
        } catch (const std::exception& e) {
          out.summary.failures.push_back({first[i].doc_id, first[i].span_index, e.what()});
        }
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (answers[i]) emit(first[i], *answers[i], out);
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> call(const SentenceSpan* first, std::size_t count,
                                             GenerationSummary& summary) const {
    GenerationRequest request;
    request.beams = cfg_.beams;
    request.max_tokens = cfg_.max_question_tokens;
    request.num_return = cfg_.questions_per_span;
    for (std::size_t i = 0; i < count; ++i) request.texts.push_back(first[i].text);

    for (int attempt = 0;; ++attempt) {
      try {
        ++summary.backend_calls;
        auto answers = backend_.generate(request);
        if (answers.size() != count) {
          throw BackendError("backend returned " + std::to_string(answers.size()) +
                             " answers for " + std::to_string(count) + " texts");
        }
        return answers;
      } catch (const std::exception&) {
        if (attempt >= cfg_.max_retries) throw;
        ++summary.retries;
      }
    }
  }

  void emit(const SentenceSpan& span, const std::vector<std::string>& answers,
            BatchOutcome& out) const {
    std::optional<Date> date = dates_ ? dates_(span.doc_id) : std::nullopt;
    std::size_t wanted = static_cast<std::size_t>(cfg_.questions_per_span);
    std::size_t emitted = 0;
    for (const auto& q : answers) {
      if (emitted == wanted) break;
      if (trim(q).empty()) continue;
      out.records.push_back({q, span.doc_id, span.span_index, date, backend_id_});
      ++emitted;
    }
    out.summary.records += emitted;
    if (emitted < wanted) {
      out.summary.failures.push_back({span.doc_id, span.span_index,
                                      "backend produced " + std::to_string(emitted) + " of " +
                                          std::to_string(wanted) + " usable questions"});
    }
  }

  const GenerationConfig& cfg_;
  GenerationBackend& backend_;
  const DateLookup& dates_;
  std::string backend_id_;
};

}  // namespace

GenerationSummary generate(const std::vector<SentenceSpan>& spans, const GenerationConfig& cfg,
                           GenerationBackend& backend, const DateLookup& dates,
                           const RecordSink& sink) {
  cfg.validate();
  GenerationSummary total;
  if (spans.empty()) return total;

  BatchRunner runner(cfg, backend, dates);
  const std::size_t num_batches = (spans.size() + cfg.batch_size - 1) / cfg.batch_size;
  auto batch_begin = [&](std::size_t b) { return b * cfg.batch_size; };
  auto batch_len = [&](std::size_t b) {
    return std::min(cfg.batch_size, spans.size() - batch_begin(b));
  };

  const std::size_t workers = std::min(cfg.max_inflight_requests, num_batches);
  if (workers <= 1) {
    for (std::size_t b = 0; b < num_batches; ++b) {
      auto outcome = runner.run(spans.data() + batch_begin(b), batch_len(b));
      for (auto& r : outcome.records) sink(std::move(r));
      total.merge(outcome.summary);
    }
    return total;
  }

  std::vector<std::optional<BatchOutcome>> slots(num_batches);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next_batch{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;

  auto work = [&] {
    while (!abort.load()) {
      std::size_t b = next_batch.fetch_add(1);
      if (b >= num_batches) return;
      try {
        auto outcome = runner.run(spans.data() + batch_begin(b), batch_len(b));
        std::lock_guard lock(mu);
        slots[b] = std::move(outcome);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!fatal) fatal = std::current_exception();
        abort = true;
      }
      ready.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);

  for (std::size_t b = 0; b < num_batches; ++b) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[b].has_value() || fatal; });
    if (fatal) break;
    BatchOutcome outcome = std::move(*slots[b]);
    slots[b].reset();
    lock.unlock();
    for (auto& r : outcome.records) sink(std::move(r));
    total.merge(outcome.summary);
  }
  abort = true;
  pool.clear();
  if (fatal) std::rethrow_exception(fatal);
  return total;
}

GenerationResult generate(const std::vector<SentenceSpan>& spans, const GenerationConfig& cfg,
                          GenerationBackend& backend, const DateLookup& dates) {
  GenerationResult result;
  result.summary = generate(spans, cfg, backend, dates,
                            [&result](QuestionRecord&& r) { result.records.push_back(std::move(r)); });
  return result;
}

std::string to_json_line(const QuestionRecord& record) {
  json j;
  j["question"] = record.question;
  j["doc_id"] = record.doc_id;
  j["span_index"] = record.span_index;
  j["publish_date"] =
      record.publish_date ? json(format_date(*record.publish_date)) : json(nullptr);
  j["backend"] = record.backend_id;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

QuestionRecord question_from_json_line(std::string_view line) {
  try {
    json j = json::parse(line);
    QuestionRecord r;
    r.question = j.at("question").get<std::string>();
    r.doc_id = j.at("doc_id").get<std::string>();
    r.span_index = j.value("span_index", std::size_t{0});
    if (auto d = j.find("publish_date"); d != j.end() && !d->is_null()) {
      r.publish_date = parse_date(d->get<std::string>());
    }
    r.backend_id = j.value("backend", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad question record: ") + e.what());
  }
}

void write_questions(const std::string& path, const std::vector<QuestionRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write question file: " + path);
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<QuestionRecord> read_questions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open question file: " + path);
  std::vector<QuestionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      records.push_back(question_from_json_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace qscope
