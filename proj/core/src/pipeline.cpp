#include "qscope/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "qscope/error.hpp"
#include "qscope/match.hpp"
#include "qscope/postprocess.hpp"

namespace qscope {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string PipelineConfig::to_json() const {
  ordered_json j;
  j["input"] = input;
  j["workdir"] = workdir;
  j["strict"] = strict;
  j["min_date"] = min_date ? ordered_json(format_date(*min_date)) : ordered_json(nullptr);
  j["terms"] = terms;
  j["match"] = match_mode == MatchMode::AnyOf ? "any" : "all";
  j["window"] = window.window_size;
  j["stride"] = window.stride;
  j["min_sentences_per_passage"] = window.min_sentences_per_passage;
  j["backend"] = backend;
  j["endpoint"] = generation.endpoint;
  j["beams"] = generation.beams;
  j["max_question_tokens"] = generation.max_question_tokens;
  j["questions_per_span"] = generation.questions_per_span;
  j["batch_size"] = generation.batch_size;
  j["max_inflight_requests"] = generation.max_inflight_requests;
  j["max_retries"] = generation.max_retries;
  j["banned_terms"] = banned_terms_path ? ordered_json(*banned_terms_path) : ordered_json(nullptr);
  j["aggressive_normalization"] = aggressive_normalization;
  j["top"] = top;
  j["min_docs"] = min_docs;
  ordered_json g = ordered_json::object();
  for (const auto& [label, phrases] : groups) g[label] = phrases;
  j["groups"] = g;
  j["group_match"] = group_match == GroupMatch::Literal ? "literal" : "stem";
  j["gold"] = gold_path ? ordered_json(*gold_path) : ordered_json(nullptr);
  j["embedder"] = embedder;
  j["embed_endpoint"] = embed_endpoint;
  j["k"] = k;
  j["seed"] = seed;
  return j.dump();
}

PipelineConfig PipelineConfig::from_json(std::string_view text) {
  PipelineConfig c;
  try {
    auto j = ordered_json::parse(text);
    if (!j.is_object()) throw ParseError("pipeline config must be a JSON object");
    auto opt_string = [&j](const char* key) -> std::optional<std::string> {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) return std::nullopt;
      return it->get<std::string>();
    };
    c.input = j.value("input", c.input);
    c.workdir = j.value("workdir", c.workdir);
    c.strict = j.value("strict", c.strict);
    if (auto d = opt_string("min_date")) c.min_date = parse_date(*d);
    c.terms = j.value("terms", c.terms);
    c.match_mode = parse_match_mode(j.value("match", std::string("any")));
    c.window.window_size = j.value("window", c.window.window_size);
    c.window.stride = j.value("stride", c.window.stride);
    c.window.min_sentences_per_passage =
        j.value("min_sentences_per_passage", c.window.min_sentences_per_passage);
    c.backend = j.value("backend", c.backend);
    c.generation.endpoint = j.value("endpoint", c.generation.endpoint);
    c.generation.beams = j.value("beams", c.generation.beams);
    c.generation.max_question_tokens = j.value("max_question_tokens", c.generation.max_question_tokens);
    c.generation.questions_per_span = j.value("questions_per_span", c.generation.questions_per_span);
    c.generation.batch_size = j.value("batch_size", c.generation.batch_size);
    c.generation.max_inflight_requests =
        j.value("max_inflight_requests", c.generation.max_inflight_requests);
    c.generation.max_retries = j.value("max_retries", c.generation.max_retries);
    c.banned_terms_path = opt_string("banned_terms");
    c.aggressive_normalization = j.value("aggressive_normalization", c.aggressive_normalization);
    c.top = j.value("top", c.top);
    c.min_docs = j.value("min_docs", c.min_docs);
    if (auto g = j.find("groups"); g != j.end() && !g->is_null()) {
      for (const auto& [label, phrases] : g->items()) {
        c.groups[label] = phrases.get<std::vector<std::string>>();
      }
    }
    auto gm = j.value("group_match", std::string("literal"));
    if (gm == "literal") {
      c.group_match = GroupMatch::Literal;
    } else if (gm == "stem") {
      c.group_match = GroupMatch::Stem;
    } else {
      throw ParseError("group_match must be 'literal' or 'stem'");
    }
    c.gold_path = opt_string("gold");
    c.embedder = j.value("embedder", c.embedder);
    c.embed_endpoint = j.value("embed_endpoint", c.embed_endpoint);
    c.k = j.value("k", c.k);
    c.seed = j.value("seed", c.seed);
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void PipelineConfig::apply_environment() {
  if (const char* ep = std::getenv("QSCOPE_GENERATE_ENDPOINT"); ep && *ep) generation.endpoint = ep;
  if (const char* ep = std::getenv("QSCOPE_EMBED_ENDPOINT"); ep && *ep) embed_endpoint = ep;
}

void PipelineConfig::validate() const {
  if (input.empty()) throw InvalidArgument("no input corpus given");
  if (workdir.empty()) throw InvalidArgument("no work directory given");
  window.validate();
  generation.validate();
  if (backend != "mock" && backend != "remote") {
    throw InvalidArgument("backend must be 'mock' or 'remote'");
  }
  if (backend == "remote" && generation.endpoint.empty()) {
    throw InvalidArgument("remote backend needs an endpoint");
  }
  if (embedder != "stub" && embedder != "remote") {
    throw InvalidArgument("embedder must be 'stub' or 'remote'");
  }
  if (gold_path && embedder == "remote" && embed_endpoint.empty()) {
    throw InvalidArgument("remote embedder needs an endpoint");
  }
  if (min_docs < 1) throw InvalidArgument("min_docs must be >= 1");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (auto f = corpus_filter()) f->validate();
}

std::optional<CorpusFilter> PipelineConfig::corpus_filter() const {
  if (!min_date && terms.empty()) return std::nullopt;
  CorpusFilter f;
  f.min_date = min_date;
  f.keyword_terms = terms;
  f.match_mode = terms.empty() ? MatchMode::AllOf : match_mode;
  return f;
}

namespace {

/// Writes through `write(tmp)` and renames over `path`, so a crash never
/// leaves a truncated artifact behind.
template <typename Write>
void write_atomically(const fs::path& path, Write&& write) {
  fs::path tmp = path;
  tmp += ".tmp";
  write(tmp.string());
  fs::rename(tmp, path);
}

class PipelineRun {
 public:
  PipelineRun(const PipelineConfig& cfg, const PipelineOptions& options)
      : cfg_(cfg), options_(options), dir_(cfg.workdir), manifest_(cfg.to_json(), cfg.seed) {}

  PipelineOutcome execute() {
    PipelineOutcome outcome;
    fs::create_directories(dir_);
    load_previous();

    if (!fs::exists(cfg_.input)) {
      fail("ingest", "input corpus not found: " + cfg_.input, outcome);
      return outcome;
    }

    for (const auto& stage : pipeline_stages()) {
      if (!enabled(stage)) continue;
      if (auto reused = reusable(stage)) {
        StageRecord r = *reused;
        r.status = "resumed";
        manifest_.append(std::move(r));
      } else {
        reuse_allowed_ = false;
        try {
          manifest_.append(run_stage(stage));
        } catch (const std::exception& e) {
          fail(stage, e.what(), outcome);
          return outcome;
        }
      }
      manifest_.save(path(files::kManifest));
      if (options_.stop_after && *options_.stop_after == stage) break;
    }
    outcome.manifest = manifest_;
    return outcome;
  }

 private:
  std::string path(const char* name) const { return (dir_ / name).string(); }

  bool enabled(const std::string& stage) const {
    if (stage == "timeseries") return !cfg_.groups.empty();
    if (stage == "match") return cfg_.gold_path.has_value();
    return true;
  }

  void load_previous() {
    if (options_.fresh) return;
    auto mpath = path(files::kManifest);
    if (!fs::exists(mpath)) return;
    try {
      auto prev = RunManifest::load(mpath);
      if (prev.config_json() != manifest_.config_json()) return;
      for (const auto& s : prev.stages()) {
        if (s.status == "failed") continue;
        previous_[s.stage] = s;
      }
    } catch (const Error&) {
      // Unreadable manifest: recompute everything.
    }
  }

  std::optional<StageRecord> reusable(const std::string& stage) const {
    if (!reuse_allowed_) return std::nullopt;
    auto it = previous_.find(stage);
    if (it == previous_.end()) return std::nullopt;
    for (const auto& out : it->second.outputs) {
      if (!fs::exists(dir_ / out)) return std::nullopt;
    }
    return it->second;
  }

  void fail(const std::string& stage, const std::string& message, PipelineOutcome& outcome) {
    StageRecord r;
    r.stage = stage;
    r.status = "failed";
    r.error = message;
    manifest_.append(std::move(r));
    manifest_.save(path(files::kManifest));
    outcome.exit_code = 1;
    outcome.error = stage + ": " + message;
    outcome.manifest = manifest_;
  }

  StageRecord run_stage(const std::string& stage) {
    if (stage == "ingest") return ingest();
    if (stage == "spans") return spans();
    if (stage == "generate") return generate_questions();
    if (stage == "postprocess") return postprocess();
    if (stage == "aggregate") return aggregate();
    if (stage == "timeseries") return timeseries();
    if (stage == "match") return match();
    throw InvalidArgument("unknown stage " + stage);
  }

  StageRecord ingest() {
    auto loaded = load_corpus(cfg_.input, cfg_.strict);
    auto docs = loaded.documents;
    if (auto f = cfg_.corpus_filter()) docs = filter_corpus(docs, *f);
    write_atomically(path(files::kCorpus), [&](const std::string& p) { write_corpus(p, docs); });
    return {"ingest",
            "completed",
            {files::kCorpus},
            {{"documents_loaded", loaded.documents.size()},
             {"records_rejected", loaded.diagnostics.size()},
             {"documents_kept", docs.size()}},
            {}};
  }

  StageRecord spans() {
    auto docs = load_corpus(path(files::kCorpus), true).documents;
    RuleSentenceSplitter splitter;
    std::vector<SentenceSpan> all;
    std::size_t docs_with_spans = 0;
    for (const auto& d : docs) {
      auto s = document_spans(d, cfg_.window, splitter);
      if (!s.empty()) ++docs_with_spans;
      std::move(s.begin(), s.end(), std::back_inserter(all));
    }
    write_atomically(path(files::kSpans), [&](const std::string& p) { write_spans(p, all); });
    return {"spans",
            "completed",
            {files::kSpans},
            {{"documents_with_spans", docs_with_spans}, {"spans", all.size()}},
            {}};
  }

  StageRecord generate_questions() {
    auto spans = read_spans(path(files::kSpans));
    auto docs = load_corpus(path(files::kCorpus), true).documents;
    std::map<std::string, std::optional<Date>> dates;
    for (const auto& d : docs) dates[d.doc_id] = d.publish_date;
    DateLookup lookup = [&dates](const std::string& id) -> std::optional<Date> {
      auto it = dates.find(id);
      return it == dates.end() ? std::nullopt : it->second;
    };

    std::unique_ptr<GenerationBackend> owned;
    GenerationBackend* backend = options_.generation_backend;
    if (!backend) {
      if (cfg_.backend == "remote") {
        owned = std::make_unique<RemoteGenerationBackend>(cfg_.generation.endpoint);
      } else {
        owned = std::make_unique<MockGenerationBackend>();
      }
      backend = owned.get();
    }
    auto result = generate(spans, cfg_.generation, *backend, lookup);
    write_atomically(path(files::kRawQuestions),
                     [&](const std::string& p) { write_questions(p, result.records); });
    return {"generate",
            "completed",
            {files::kRawQuestions},
            {{"spans", spans.size()},
             {"generations", result.records.size()},
             {"failed_spans", result.summary.failures.size()},
             {"backend_calls", result.summary.backend_calls}},
            {}};
  }

  StageRecord postprocess() {
    auto records = read_questions(path(files::kRawQuestions));
    FilterConfig filter =
        cfg_.banned_terms_path ? FilterConfig::from_file(*cfg_.banned_terms_path) : FilterConfig{};
    auto result = filter_questions(records, filter);
    for (auto& r : result.kept) {
      r.question = cfg_.aggressive_normalization ? normalize_question_aggressive(r.question)
                                                 : normalize_question(r.question);
    }
    write_atomically(path(files::kCleanQuestions),
                     [&](const std::string& p) { write_questions(p, result.kept); });
    return {"postprocess",
            "completed",
            {files::kCleanQuestions},
            {{"post_filter_questions", result.kept.size()}, {"filtered_out", result.dropped}},
            {}};
  }

  StageRecord aggregate() {
    auto records = read_questions(path(files::kCleanQuestions));
    auto entries = count_frequencies(records);
    auto frequent = filter_by_doc_frequency(entries, cfg_.min_docs);
    auto shown = frequent;
    if (cfg_.top > 0 && shown.size() > cfg_.top) shown.resize(cfg_.top);
    write_atomically(path(files::kFrequencies),
                     [&](const std::string& p) { write_frequency_csv(p, entries); });
    write_atomically(path(files::kFrequent),
                     [&](const std::string& p) { write_frequency_csv(p, shown); });
    return {"aggregate",
            "completed",
            {files::kFrequencies, files::kFrequent},
            {{"unique_questions", entries.size()}, {"frequent_questions", frequent.size()}},
            {}};
  }

  StageRecord timeseries() {
    auto records = read_questions(path(files::kCleanQuestions));
    auto series = keyword_group_series(records, cfg_.groups, cfg_.group_match);
    write_atomically(path(files::kSeries), [&](const std::string& p) { write_series_csv(p, series); });
    std::size_t months = series.empty() ? 0 : series.front().buckets.size();
    return {"timeseries",
            "completed",
            {files::kSeries},
            {{"groups", series.size()}, {"months", months}},
            {}};
  }

  StageRecord match() {
    std::vector<std::string> references;
    for (auto& g : read_gold(*cfg_.gold_path)) references.push_back(std::move(g.reference));
    auto frequent = filter_by_doc_frequency(read_frequency_csv(path(files::kFrequencies)),
                                            cfg_.min_docs);

    std::unique_ptr<EmbeddingBackend> owned;
    EmbeddingBackend* embedder = options_.embedding_backend;
    if (!embedder) {
      if (cfg_.embedder == "remote") {
        owned = std::make_unique<RemoteEmbedder>(cfg_.embed_endpoint);
      } else {
        owned = std::make_unique<StubEmbedder>(cfg_.seed);
      }
      embedder = owned.get();
    }

    std::string partial = path(files::kSheet) + ".partial";
    ExperimentOptions opts{cfg_.k, partial};
    auto result = frequent.empty() ? ExperimentResult{}
                                   : frequent_question_experiment(references, frequent, *embedder, opts);
    write_atomically(path(files::kSheet),
                     [&](const std::string& p) { write_sheet(p, result.sheet); });
    fs::remove(partial);
    return {"match",
            "completed",
            {files::kSheet},
            {{"references", references.size()}, {"sheet_rows", result.sheet.rows.size()}},
            {}};
  }

  const PipelineConfig& cfg_;
  const PipelineOptions& options_;
  fs::path dir_;
  RunManifest manifest_;
  std::map<std::string, StageRecord> previous_;
  bool reuse_allowed_ = true;
};

}  // namespace

PipelineOutcome run_pipeline(const PipelineConfig& config, const PipelineOptions& options) {
  config.validate();
  return PipelineRun(config, options).execute();
}

}  // namespace qscope
