// qscope: corpus exploration through generated questions.
//
// Every pipeline stage is a subcommand reading and writing plain JSON-lines
// or CSV files; `run` chains them with checkpoints and a manifest.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qscope/aggregate.hpp"
#include "qscope/corpus.hpp"
#include "qscope/error.hpp"
#include "qscope/generation.hpp"
#include "qscope/manifest.hpp"
#include "qscope/match.hpp"
#include "qscope/pipeline.hpp"
#include "qscope/postprocess.hpp"
#include "qscope/preprocess.hpp"
#include "qscope/text.hpp"

namespace {

using namespace qscope;

std::string env_or(const char* var, const std::string& fallback) {
  const char* v = std::getenv(var);
  return (v && *v) ? std::string(v) : fallback;
}

std::vector<std::string> comma_list(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  for (auto& part : split(s, ',')) {
    auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::unique_ptr<EmbeddingBackend> make_embedder(const std::string& kind, const std::string& endpoint,
                                                std::uint64_t seed) {
  if (kind == "stub") return std::make_unique<StubEmbedder>(seed);
  if (kind == "remote") return std::make_unique<RemoteEmbedder>(env_or("QSCOPE_EMBED_ENDPOINT", endpoint));
  throw InvalidArgument("embedder must be 'stub' or 'remote'");
}

void report_excluded(const std::vector<ExcludedRow>& excluded) {
  for (const auto& e : excluded) {
    std::cerr << "excluded: \"" << e.reference << "\" [" << e.context << "]: " << e.reason << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qscope: summarize a document collection by the questions it answers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 13;
  app.add_option("--seed", seed, "Seed for every stochastic component")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a JSON-lines corpus and apply the date/keyword filter");
  std::string ingest_in, ingest_out, min_date, terms, match_mode = "any", format = "jsonl";
  bool strict = false;
  ingest->add_option("--input", ingest_in, "Corpus file (JSON lines)")->required()->check(CLI::ExistingFile);
  ingest->add_option("--output", ingest_out, "Filtered corpus file")->required();
  ingest->add_option("--min-date", min_date, "Keep documents published strictly after YYYY-MM-DD");
  ingest->add_option("--terms", terms, "Comma-separated case-insensitive keywords");
  ingest->add_option("--match", match_mode, "any | all")->capture_default_str();
  ingest->add_option("--format", format, "Corpus format id")->capture_default_str();
  ingest->add_flag("--strict", strict, "Abort on the first malformed record");

  // spans
  auto* spans = app.add_subcommand("spans", "Clean, sentence-split and window documents into spans");
  std::string spans_in, spans_out;
  WindowConfig window;
  spans->add_option("--input", spans_in, "Corpus file")->required()->check(CLI::ExistingFile);
  spans->add_option("--output", spans_out, "Span file (JSON lines)")->required();
  spans->add_option("--window", window.window_size, "Sentences per span")->capture_default_str();
  spans->add_option("--stride", window.stride, "Sentences between span starts")->capture_default_str();
  spans->add_option("--min-sentences", window.min_sentences_per_passage,
                    "Drop passages with fewer sentences")->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate questions for every span");
  std::string gen_spans, gen_out, gen_backend = "mock", gen_corpus;
  GenerationConfig gen_cfg;
  gen->add_option("--spans", gen_spans, "Span file")->required()->check(CLI::ExistingFile);
  gen->add_option("--output", gen_out, "Question file (JSON lines)")->required();
  gen->add_option("--backend", gen_backend, "mock | remote")->capture_default_str();
  gen->add_option("--endpoint", gen_cfg.endpoint, "Generation service URL (env QSCOPE_GENERATE_ENDPOINT)");
  gen->add_option("--beams", gen_cfg.beams, "Beam width")->capture_default_str();
  gen->add_option("--max-tokens", gen_cfg.max_question_tokens, "Max question tokens")->capture_default_str();
  gen->add_option("--questions-per-span", gen_cfg.questions_per_span, "Questions kept per span")->capture_default_str();
  gen->add_option("--batch-size", gen_cfg.batch_size, "Spans per request")->capture_default_str();
  gen->add_option("--max-inflight", gen_cfg.max_inflight_requests, "Concurrent requests")->capture_default_str();
  gen->add_option("--retries", gen_cfg.max_retries, "Retries per failed batch")->capture_default_str();
  gen->add_option("--corpus", gen_corpus, "Corpus file supplying publish dates")->check(CLI::ExistingFile);

  // postprocess
  auto* post = app.add_subcommand("postprocess", "Drop boilerplate questions and normalize the rest");
  std::string post_in, post_out, banned;
  bool aggressive = false;
  post->add_option("--input", post_in, "Question file")->required()->check(CLI::ExistingFile);
  post->add_option("--output", post_out, "Clean question file")->required();
  post->add_option("--banned-terms", banned, "Banned-terms file")->check(CLI::ExistingFile);
  post->add_flag("--aggressive", aggressive, "Also map hyphens to spaces and strip trailing '?'");

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "Question frequency table");
  std::string agg_in, agg_out;
  std::size_t top = 1000, min_docs = 3;
  agg->add_option("--input", agg_in, "Clean question file")->required()->check(CLI::ExistingFile);
  agg->add_option("--output", agg_out, "CSV rank,question,span_count,doc_count")->required();
  agg->add_option("--top", top, "Rows to keep (0 = all)")->capture_default_str();
  agg->add_option("--min-docs", min_docs, "Minimum distinct documents")->capture_default_str();

  // timeseries
  auto* ts = app.add_subcommand("timeseries", "Keyword-group question counts per publication month");
  std::string ts_in, ts_groups, ts_out, bucket = "month", ts_match = "literal";
  ts->add_option("--input", ts_in, "Clean question file")->required()->check(CLI::ExistingFile);
  ts->add_option("--groups", ts_groups, "JSON {label: [phrases]}")->required()->check(CLI::ExistingFile);
  ts->add_option("--output", ts_out, "CSV group,month,count")->required();
  ts->add_option("--bucket", bucket, "Bucket granularity")->capture_default_str()->check(CLI::IsMember({"month"}));
  ts->add_option("--match", ts_match, "literal | stem")->capture_default_str()->check(CLI::IsMember({"literal", "stem"}));

  // match
  auto* match = app.add_subcommand("match", "Rank generated questions against reference questions");
  match->require_subcommand(1);
  std::string gold, questions, endpoint, sheet_out, embedder_kind = "stub", checkpoint;
  std::size_t k = 3, match_min_docs = 3;
  std::vector<CLI::App*> experiments;
  for (const char* name : {"per-doc", "frequent"}) {
    auto* sub = match->add_subcommand(name, std::string(name) == "per-doc"
                                                ? "Per-document experiment sheet"
                                                : "Frequent-question experiment sheet");
    sub->add_option("--gold", gold, "Gold JSON lines {question, doc_id}")->required()->check(CLI::ExistingFile);
    sub->add_option("--questions", questions,
                    "Clean question file, or (frequent) a frequency CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--embedder", embedder_kind, "stub | remote")->capture_default_str();
    sub->add_option("--endpoint", endpoint, "Embedding service URL (env QSCOPE_EMBED_ENDPOINT)");
    sub->add_option("--out", sheet_out, "Annotation sheet CSV")->required();
    sub->add_option("--k", k, "Candidates per reference")->capture_default_str();
    sub->add_option("--checkpoint", checkpoint, "Resumable partial sheet");
    if (std::string(name) == "frequent") {
      sub->add_option("--min-docs", match_min_docs, "Doc-frequency filter for JSON-lines input")
          ->capture_default_str();
    }
    experiments.push_back(sub);
  }
  auto* summarize = match->add_subcommand("summarize", "Count strong/weak/none labels of a finished sheet");
  std::string sheet_in;
  bool as_json = false;
  summarize->add_option("--sheet", sheet_in, "Annotated sheet")->required()->check(CLI::ExistingFile);
  summarize->add_flag("--json", as_json, "Machine-readable output with exact fractions");

  qscope::cli::add_topics_command(app, seed);

  // run
  auto* run = app.add_subcommand("run", "Full pipeline with checkpoints and a manifest");
  std::string config_path, stop_after;
  PipelineConfig run_cfg;
  std::string run_min_date, run_terms, run_groups, run_match = "any";
  bool fresh = false;
  run->add_option("--config", config_path, "JSON config (flags given explicitly override it)")
      ->check(CLI::ExistingFile);
  run->add_option("--input", run_cfg.input, "Corpus file");
  run->add_option("--workdir", run_cfg.workdir, "Directory for artifacts and manifest");
  run->add_option("--min-date", run_min_date, "Publish-date cutoff YYYY-MM-DD");
  run->add_option("--terms", run_terms, "Comma-separated keywords");
  run->add_option("--match", run_match, "any | all");
  run->add_option("--window", run_cfg.window.window_size, "Sentences per span");
  run->add_option("--stride", run_cfg.window.stride, "Sentences between span starts");
  run->add_option("--backend", run_cfg.backend, "mock | remote");
  run->add_option("--endpoint", run_cfg.generation.endpoint, "Generation service URL");
  run->add_option("--beams", run_cfg.generation.beams, "Beam width");
  run->add_option("--banned-terms", run_cfg.banned_terms_path, "Banned-terms file");
  run->add_option("--top", run_cfg.top, "Rows in frequent.csv (0 = all)");
  run->add_option("--min-docs", run_cfg.min_docs, "Minimum distinct documents");
  run->add_option("--groups", run_groups, "Keyword groups JSON file")->check(CLI::ExistingFile);
  run->add_option("--gold", run_cfg.gold_path, "Reference questions for the frequent-question sheet");
  run->add_option("--embedder", run_cfg.embedder, "stub | remote");
  run->add_option("--embed-endpoint", run_cfg.embed_endpoint, "Embedding service URL");
  run->add_option("--stop-after", stop_after, "Stop after this stage")
      ->check(CLI::IsMember(pipeline_stages()));
  run->add_flag("--fresh", fresh, "Ignore existing checkpoints");

  // manifest show
  auto* manifest = app.add_subcommand("manifest", "Inspect run manifests");
  manifest->require_subcommand(1);
  auto* show = manifest->add_subcommand("show", "Print a manifest");
  std::string manifest_path;
  show->add_option("path", manifest_path, "manifest.json or a run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto result = load_corpus(ingest_in, strict, parse_corpus_format(format));
      for (const auto& d : result.diagnostics) {
        std::cerr << ingest_in << ":" << d.line << ": skipped: " << d.message << '\n';
      }
      auto docs = result.documents;
      if (!min_date.empty() || !terms.empty()) {
        CorpusFilter f;
        if (!min_date.empty()) f.min_date = parse_date(min_date);
        f.keyword_terms = comma_list(terms);
        f.match_mode = f.keyword_terms.empty() ? MatchMode::AllOf : parse_match_mode(match_mode);
        f.validate();
        docs = filter_corpus(docs, f);
      }
      write_corpus(ingest_out, docs);
      std::cerr << "loaded " << result.documents.size() << ", rejected " << result.diagnostics.size()
                << ", kept " << docs.size() << '\n';
    } else if (*spans) {
      window.validate();
      RuleSentenceSplitter splitter;
      std::vector<SentenceSpan> all;
      CorpusReader reader(spans_in, true);
      while (auto doc = reader.next()) {
        auto s = document_spans(*doc, window, splitter);
        std::move(s.begin(), s.end(), std::back_inserter(all));
      }
      write_spans(spans_out, all);
      std::cerr << "spans " << all.size() << '\n';
    } else if (*gen) {
      gen_cfg.endpoint = env_or("QSCOPE_GENERATE_ENDPOINT", gen_cfg.endpoint);
      std::unique_ptr<GenerationBackend> backend;
      if (gen_backend == "mock") {
        backend = std::make_unique<MockGenerationBackend>();
      } else if (gen_backend == "remote") {
        backend = std::make_unique<RemoteGenerationBackend>(gen_cfg.endpoint);
      } else {
        throw InvalidArgument("backend must be 'mock' or 'remote'");
      }
      std::map<std::string, std::optional<Date>> dates;
      if (!gen_corpus.empty()) {
        CorpusReader reader(gen_corpus, false);
        while (auto doc = reader.next()) dates[doc->doc_id] = doc->publish_date;
      }
      DateLookup lookup = [&dates](const std::string& id) -> std::optional<Date> {
        auto it = dates.find(id);
        return it == dates.end() ? std::nullopt : it->second;
      };
      auto spans_in_file = read_spans(gen_spans);
      auto result = generate(spans_in_file, gen_cfg, *backend, lookup);
      write_questions(gen_out, result.records);
      for (const auto& f : result.summary.failures) {
        std::cerr << "failed span " << f.doc_id << "#" << f.span_index << ": " << f.message << '\n';
      }
      std::cerr << "spans " << result.summary.spans << ", generations " << result.summary.records
                << ", failed spans " << result.summary.failures.size() << '\n';
    } else if (*post) {
      FilterConfig cfg = banned.empty() ? FilterConfig{} : FilterConfig::from_file(banned);
      auto result = filter_questions(read_questions(post_in), cfg);
      for (auto& r : result.kept) {
        r.question = aggressive ? normalize_question_aggressive(r.question) : normalize_question(r.question);
      }
      write_questions(post_out, result.kept);
      std::cerr << "kept " << result.kept.size() << ", dropped " << result.dropped << '\n';
    } else if (*agg) {
      auto entries = count_frequencies(read_questions(agg_in));
      auto kept = filter_by_doc_frequency(entries, min_docs);
      std::cerr << "unique " << entries.size() << ", with >= " << min_docs << " documents " << kept.size()
                << '\n';
      if (top > 0 && kept.size() > top) kept.resize(top);
      write_frequency_csv(agg_out, kept);
    } else if (*ts) {
      auto series = keyword_group_series(read_questions(ts_in), load_keyword_groups(ts_groups),
                                         ts_match == "stem" ? GroupMatch::Stem : GroupMatch::Literal);
      write_series_csv(ts_out, series);
    } else if (*match) {
      if (*summarize) {
        auto summary = summarize_annotations(read_sheet(sheet_in));
        std::cout << (as_json ? summary.to_json() : summary.display()) << '\n';
        return 0;
      }
      auto embedder = make_embedder(embedder_kind, endpoint, seed);
      ExperimentOptions options;
      options.k = k;
      if (!checkpoint.empty()) options.checkpoint_path = checkpoint;
      auto gold_rows = read_gold(gold);
      ExperimentResult result;
      if (*experiments[0]) {
        result = per_document_experiment(gold_rows, read_questions(questions), *embedder, options);
      } else {
        std::vector<FrequencyEntry> frequent;
        if (std::filesystem::path(questions).extension() == ".csv") {
          frequent = read_frequency_csv(questions);
        } else {
          frequent = filter_by_doc_frequency(count_frequencies(read_questions(questions)), match_min_docs);
        }
        std::vector<std::string> refs;
        for (auto& g : gold_rows) refs.push_back(std::move(g.reference));
        result = frequent_question_experiment(refs, frequent, *embedder, options);
      }
      report_excluded(result.excluded);
      write_sheet(sheet_out, result.sheet);
      std::cerr << "rows " << result.sheet.rows.size() << ", excluded " << result.excluded.size() << '\n';
    } else if (*run) {
      PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : PipelineConfig::from_file(config_path);
      // Explicit flags override the config file.
      auto given = [run](const char* flag) { return run->count(flag) > 0; };
      if (given("--input")) cfg.input = run_cfg.input;
      if (given("--workdir")) cfg.workdir = run_cfg.workdir;
      if (given("--min-date")) cfg.min_date = parse_date(run_min_date);
      if (given("--terms")) cfg.terms = comma_list(run_terms);
      if (given("--match")) cfg.match_mode = parse_match_mode(run_match);
      if (given("--window")) cfg.window.window_size = run_cfg.window.window_size;
      if (given("--stride")) cfg.window.stride = run_cfg.window.stride;
      if (given("--backend")) cfg.backend = run_cfg.backend;
      if (given("--endpoint")) cfg.generation.endpoint = run_cfg.generation.endpoint;
      if (given("--beams")) cfg.generation.beams = run_cfg.generation.beams;
      if (given("--banned-terms")) cfg.banned_terms_path = run_cfg.banned_terms_path;
      if (given("--top")) cfg.top = run_cfg.top;
      if (given("--min-docs")) cfg.min_docs = run_cfg.min_docs;
      if (given("--groups")) cfg.groups = load_keyword_groups(run_groups);
      if (given("--gold")) cfg.gold_path = run_cfg.gold_path;
      if (given("--embedder")) cfg.embedder = run_cfg.embedder;
      if (given("--embed-endpoint")) cfg.embed_endpoint = run_cfg.embed_endpoint;
      if (app.count("--seed")) cfg.seed = seed;
      cfg.apply_environment();

      PipelineOptions options;
      options.fresh = fresh;
      if (!stop_after.empty()) options.stop_after = stop_after;
      auto outcome = run_pipeline(cfg, options);
      std::cerr << outcome.manifest.render();
      if (outcome.exit_code != 0) {
        std::cerr << "error: " << outcome.error << '\n';
        return outcome.exit_code;
      }
    } else if (*manifest) {
      std::filesystem::path p(manifest_path);
      if (std::filesystem::is_directory(p)) p /= files::kManifest;
      std::cout << RunManifest::load(p.string()).render();
    }
  } catch (const qscope::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
