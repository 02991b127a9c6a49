#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "qscope/error.hpp"
#include "qscope/manifest.hpp"
#include "qscope/pipeline.hpp"
#include "support/fixtures.hpp"

namespace qscope {
namespace {

namespace fs = std::filesystem;
using testing::read_text;
using testing::TempDir;

const std::vector<std::string> kArtifacts{
    files::kCorpus,    files::kSpans,    files::kRawQuestions, files::kCleanQuestions,
    files::kFrequencies, files::kFrequent, files::kSeries,     files::kSheet};

PipelineConfig base_config(const TempDir& dir, const std::string& workdir) {
  write_corpus(dir.file("corpus.jsonl"), testing::synthetic_corpus(20, 42));
  testing::write_text(dir.file("gold.jsonl"),
                      R"({"question":"what is covid"})" "\n"
                      R"({"question":"how does the vaccine reduce mortality"})" "\n");
  PipelineConfig cfg;
  cfg.input = dir.file("corpus.jsonl");
  cfg.workdir = dir.file(workdir);
  cfg.window = WindowConfig{3, 2, 2};
  cfg.min_docs = 2;
  cfg.groups = {{"vaccine", {"vaccine"}}, {"masks", {"mask"}}};
  cfg.gold_path = dir.file("gold.jsonl");
  return cfg;
}

TEST(Manifest, JsonRoundTrip) {
  RunManifest m(R"({"input":"x"})", 13);
  m.append({"ingest", "completed", {"corpus.jsonl"}, {{"documents_loaded", 3}}, {}});
  m.append({"spans", "failed", {}, {}, "boom"});
  auto back = RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_EQ(back.seed(), 13u);
  EXPECT_EQ(back.tool_version(), kToolVersion);
  EXPECT_EQ(back.count("documents_loaded"), 3u);
  EXPECT_EQ(back.find("spans"), nullptr);
  ASSERT_NE(back.find("ingest"), nullptr);
}

TEST(Manifest, CountViolations) {
  RunManifest m("{}", 1);
  m.append({"generate", "completed", {}, {{"spans", 10}, {"generations", 12}}, {}});
  m.append({"postprocess", "completed", {}, {{"post_filter_questions", 11}}, {}});
  m.append({"aggregate", "completed", {}, {{"unique_questions", 12}}, {}});
  EXPECT_EQ(m.count_violations(1).size(), 2u);
  EXPECT_EQ(m.count_violations(2).size(), 1u);
}

TEST(Manifest, SaveIsAtomicAndLoadable) {
  TempDir dir;
  RunManifest m("{}", 5);
  m.save(dir.file("manifest.json"));
  EXPECT_FALSE(fs::exists(dir.file("manifest.json.tmp")));
  EXPECT_EQ(RunManifest::load(dir.file("manifest.json")).seed(), 5u);
  EXPECT_THROW(RunManifest::load(dir.file("missing.json")), IoError);
}

TEST(PipelineConfig, JsonRoundTrip) {
  PipelineConfig cfg;
  cfg.input = "in.jsonl";
  cfg.min_date = parse_date("2019-10-01");
  cfg.terms = {"covid", "sars"};
  cfg.match_mode = MatchMode::AllOf;
  cfg.groups = {{"g", {"a", "b"}}};
  cfg.group_match = GroupMatch::Stem;
  cfg.gold_path = "gold.jsonl";
  cfg.generation.questions_per_span = 3;
  auto back = PipelineConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EXPECT_EQ(back.min_date, cfg.min_date);
  EXPECT_EQ(back.groups, cfg.groups);
}

TEST(PipelineConfig, Validation) {
  PipelineConfig cfg;
  EXPECT_THROW(cfg.validate(), InvalidArgument);  // no input
  cfg.input = "x";
  EXPECT_NO_THROW(cfg.validate());
  cfg.backend = "remote";
  EXPECT_THROW(cfg.validate(), InvalidArgument);  // no endpoint
  cfg.backend = "gpt";
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(PipelineConfig, EnvironmentOverridesEndpoints) {
  PipelineConfig cfg;
  cfg.generation.endpoint = "http://a";
  ::setenv("QSCOPE_GENERATE_ENDPOINT", "http://b:1", 1);
  cfg.apply_environment();
  ::unsetenv("QSCOPE_GENERATE_ENDPOINT");
  EXPECT_EQ(cfg.generation.endpoint, "http://b:1");
}

TEST(PipelineConfig, CorpusFilterConventions) {
  PipelineConfig cfg;
  EXPECT_FALSE(cfg.corpus_filter().has_value());
  cfg.min_date = parse_date("2019-10-31");
  auto f = cfg.corpus_filter();
  ASSERT_TRUE(f.has_value());
  Document dated{"d", "", parse_date("2020-01-01"), {"no keywords"}};
  EXPECT_TRUE(f->keeps(dated));
  cfg.terms = {"covid"};
  EXPECT_FALSE(cfg.corpus_filter()->keeps(dated));
}

TEST(Pipeline, MissingInputWritesOnlyManifest) {
  TempDir dir;
  PipelineConfig cfg;
  cfg.input = dir.file("absent.jsonl");
  cfg.workdir = dir.file("run");
  auto outcome = run_pipeline(cfg);
  EXPECT_EQ(outcome.exit_code, 1);
  EXPECT_NE(outcome.error.find("absent.jsonl"), std::string::npos);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(cfg.workdir)) names.push_back(e.path().filename());
  EXPECT_EQ(names, std::vector<std::string>{files::kManifest});
  auto m = RunManifest::load(dir.file("run/manifest.json"));
  ASSERT_EQ(m.stages().size(), 1u);
  EXPECT_EQ(m.stages()[0].status, "failed");
}

TEST(Pipeline, FullRunCountsAreConsistent) {
  TempDir dir;
  auto cfg = base_config(dir, "run");
  auto outcome = run_pipeline(cfg);
  ASSERT_EQ(outcome.exit_code, 0) << outcome.error;
  for (const auto& name : kArtifacts) EXPECT_TRUE(fs::exists(dir.file("run/" + name))) << name;
  const auto& m = outcome.manifest;
  EXPECT_EQ(m.stages().size(), pipeline_stages().size());
  EXPECT_TRUE(m.count_violations(1).empty());
  EXPECT_EQ(m.count("documents_loaded"), 20u);
  EXPECT_GT(*m.count("spans"), 0u);
  EXPECT_EQ(m.count("references"), 2u);
  EXPECT_FALSE(fs::exists(dir.file("run/frequent_sheet.csv.partial")));
}

TEST(Pipeline, RerunIsByteIdentical) {
  TempDir dir;
  auto a = base_config(dir, "a");
  auto b = base_config(dir, "b");
  ASSERT_EQ(run_pipeline(a).exit_code, 0);
  ASSERT_EQ(run_pipeline(b).exit_code, 0);
  for (const auto& name : kArtifacts) {
    EXPECT_EQ(read_text(dir.file("a/" + name)), read_text(dir.file("b/" + name))) << name;
  }
}

TEST(Pipeline, ResumeReusesCompletedStages) {
  TempDir dir;
  auto cfg = base_config(dir, "run");
  PipelineOptions stop;
  stop.stop_after = "generate";
  auto first = run_pipeline(cfg, stop);
  ASSERT_EQ(first.exit_code, 0);
  EXPECT_EQ(first.manifest.stages().size(), 3u);
  EXPECT_FALSE(fs::exists(dir.file("run/frequencies.csv")));

  auto second = run_pipeline(cfg);
  ASSERT_EQ(second.exit_code, 0);
  const auto& stages = second.manifest.stages();
  ASSERT_EQ(stages.size(), pipeline_stages().size());
  EXPECT_EQ(stages[0].status, "resumed");
  EXPECT_EQ(stages[2].status, "resumed");
  EXPECT_EQ(stages[3].status, "completed");

  auto ref = base_config(dir, "ref");
  ASSERT_EQ(run_pipeline(ref).exit_code, 0);
  for (const auto& name : kArtifacts) {
    EXPECT_EQ(read_text(dir.file("run/" + name)), read_text(dir.file("ref/" + name))) << name;
  }
}

TEST(Pipeline, ChangedConfigOrFreshRecomputes) {
  TempDir dir;
  auto cfg = base_config(dir, "run");
  ASSERT_EQ(run_pipeline(cfg).exit_code, 0);
  PipelineOptions fresh;
  fresh.fresh = true;
  auto forced = run_pipeline(cfg, fresh);
  ASSERT_FALSE(forced.manifest.stages().empty());
  for (const auto& s : forced.manifest.stages()) EXPECT_EQ(s.status, "completed");
  cfg.min_docs = 3;
  auto changed = run_pipeline(cfg);
  ASSERT_FALSE(changed.manifest.stages().empty());
  for (const auto& s : changed.manifest.stages()) EXPECT_EQ(s.status, "completed");
}

TEST(Pipeline, DeletedArtifactIsRecomputed) {
  TempDir dir;
  auto cfg = base_config(dir, "run");
  ASSERT_EQ(run_pipeline(cfg).exit_code, 0);
  fs::remove(dir.file("run/spans.jsonl"));
  auto outcome = run_pipeline(cfg);
  const auto& stages = outcome.manifest.stages();
  ASSERT_GE(stages.size(), 2u);
  EXPECT_EQ(stages[0].status, "resumed");
  for (std::size_t i = 1; i < stages.size(); ++i) EXPECT_EQ(stages[i].status, "completed");
}

TEST(Pipeline, StageFailureIsRecorded) {
  class Down final : public GenerationBackend {
   public:
    std::string id() const override { return "down"; }
    std::vector<std::vector<std::string>> generate(const GenerationRequest&) override {
      throw BackendUnavailable("connection refused");
    }
  } down;
  TempDir dir;
  auto cfg = base_config(dir, "run");
  cfg.generation.max_retries = 0;
  PipelineOptions opts;
  opts.generation_backend = &down;
  auto outcome = run_pipeline(cfg, opts);
  EXPECT_EQ(outcome.exit_code, 1);
  const auto& last = outcome.manifest.stages().back();
  EXPECT_EQ(last.stage, "generate");
  EXPECT_EQ(last.status, "failed");
  EXPECT_NE(last.error.find("connection refused"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir.file("run/questions.raw.jsonl")));

  // Once the backend is back, the run resumes after ingest and spans.
  auto resumed = run_pipeline(cfg);
  ASSERT_EQ(resumed.exit_code, 0);
  EXPECT_EQ(resumed.manifest.stages()[1].status, "resumed");
  EXPECT_EQ(resumed.manifest.stages()[2].status, "completed");
}

}  // namespace
}  // namespace qscope
