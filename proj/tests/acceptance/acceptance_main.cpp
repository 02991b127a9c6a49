// Acceptance suite. Each criterion prints exactly one line:
//   PASS <name>: <detail>   or   FAIL <name>: <detail>
// Usage: qscope_acceptance [--criterion NAME]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qscope/aggregate.hpp"
#include "qscope/embedding.hpp"
#include "qscope/match.hpp"
#include "qscope/pipeline.hpp"
#include "qscope/preprocess.hpp"
#include "qscope/stopwords.hpp"
#include "qscope/topics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace qscope::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail.str("");
      detail << what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << x;
  return s.str();
}

void windowing(Verdict& v) {
  auto t0 = Clock::now();
  std::size_t cases = 0;
  std::vector<std::string> sentences;
  for (std::size_t i = 0; i < 100; ++i) sentences.push_back("S" + std::to_string(i) + ".");
  for (std::size_t w = 1; w <= 12 && v.pass; ++w) {
    for (std::size_t s = 1; s <= w && v.pass; ++s) {
      for (std::size_t n = 0; n <= 100 && v.pass; ++n) {
        ++cases;
        std::vector<std::string> input(sentences.begin(), sentences.begin() + n);
        auto spans = window_spans(input, WindowConfig{w, s, 2}, "doc");
        auto want = oracle::windows(n, w, s, 2);
        bool ok = spans.size() == want.size();
        for (std::size_t i = 0; ok && i < spans.size(); ++i) {
          std::string text;
          for (auto j = want[i].first; j < want[i].second; ++j) text += (text.empty() ? "" : " ") + input[j];
          ok = spans[i].sentence_start == want[i].first && spans[i].sentence_end == want[i].second &&
               spans[i].span_index == i && spans[i].doc_id == "doc" && spans[i].text == text;
        }
        v.check(ok, "mismatch at n=" + std::to_string(n) + " window=" + std::to_string(w) +
                        " stride=" + std::to_string(s));
      }
    }
  }
  double secs = seconds_since(t0);
  v.check(secs < 1.0, "took " + fmt(secs) + " s (limit 1 s)");
  if (v.pass) v.detail << cases << " (n, window, stride) cases equal the brute force in " << fmt(secs) << " s";
}

void aggregation(Verdict& v) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(2020);
  auto records = testing::random_records(1000, rng, 60, 40);
  auto single = count_frequencies(records);
  v.check(single == oracle::naive_frequencies(records), "count_frequencies differs from naive counter");
  for (int trial = 0; trial < 20 && v.pass; ++trial) {
    std::size_t shards = 2 + rng() % 15;
    std::vector<FrequencyCounter> parts(shards);
    for (const auto& r : records) parts[rng() % shards].add(r);
    std::shuffle(parts.begin(), parts.end(), rng);
    FrequencyCounter merged;
    for (const auto& p : parts) merged.merge(p);
    v.check(merged.entries() == single, "sharding " + std::to_string(trial) + " differs");
  }
  double secs = seconds_since(t0);
  v.check(secs < 1.0, "took " + fmt(secs) + " s (limit 1 s)");
  if (v.pass) {
    v.detail << "1000 records, " << single.size() << " questions; 20 shardings merge exactly; "
             << fmt(secs) << " s";
  }
}

void doc_frequency(Verdict& v) {
  std::mt19937_64 rng(77);
  std::size_t kept_total = 0, entries_total = 0;
  for (int trial = 0; trial < 50 && v.pass; ++trial) {
    auto records = testing::random_records(200 + rng() % 800, rng, 5 + rng() % 80, 2 + rng() % 20);
    auto table = count_frequencies(records);
    std::vector<FrequencyEntry> brute;
    for (const auto& e : oracle::naive_frequencies(records)) {
      if (e.doc_count >= 3) brute.push_back(e);
    }
    auto got = filter_by_doc_frequency(table, 3);
    v.check(got == brute, "trial " + std::to_string(trial) + " differs from brute force");
    for (const auto& e : table) {
      v.check(e.span_count >= e.doc_count, "span_count < doc_count for '" + e.question + "'");
    }
    kept_total += got.size();
    entries_total += table.size();
  }
  if (v.pass) {
    v.detail << "50 randomized tables, kept " << kept_total << " of " << entries_total
             << " entries; span_count >= doc_count everywhere";
  }
}

std::string random_sentence(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words) {
  static const std::vector<std::string> words{
      "what", "is", "the", "covid", "vaccine", "mortality", "rate", "of", "sars", "cov",
      "incubation", "period", "how", "does", "virus", "spread", "masks", "work", "cells",
      "protein", "risk", "children", "hospital", "treatment", "symptoms", "long", "test"};
  std::size_t n = min_words + rng() % (max_words - min_words + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
  return s;
}

void bertscore_criterion(Verdict& v) {
  std::mt19937_64 rng(100);
  StubEmbedder embedder(13);
  std::vector<std::string> texts;
  for (int i = 0; i < 100; ++i) texts.push_back(random_sentence(rng, 1, 12));
  auto seqs = embedder.embed(texts);
  double worst_self = 0, worst_sym = 0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    auto s = bertscore(seqs[i], seqs[i]);
    worst_self = std::max({worst_self, std::fabs(s.f1 - 1.0), std::fabs(s.precision - 1.0),
                           std::fabs(s.recall - 1.0)});
    auto& other = seqs[(i * 37 + 11) % seqs.size()];
    auto ab = bertscore(seqs[i], other);
    auto ba = bertscore(other, seqs[i]);
    worst_sym = std::max({worst_sym, std::fabs(ab.f1 - ba.f1), std::fabs(ab.precision - ba.recall),
                          std::fabs(ab.recall - ba.precision)});
  }
  v.check(worst_self <= 1e-9, "bertscore(x,x) off by " + std::to_string(worst_self));
  v.check(worst_sym <= 1e-12, "symmetry/transpose off by " + std::to_string(worst_sym));

  TokenEmbeddingSeq ref({"a", "b"}, {{1, 0}, {0, 1}});
  TokenEmbeddingSeq cand({"a"}, {{1, 0}});
  auto s = bertscore(ref, cand);
  v.check(std::fabs(s.recall - 0.5) <= 1e-9 && std::fabs(s.precision - 1.0) <= 1e-9 &&
              std::fabs(s.f1 - 2.0 / 3.0) <= 1e-9,
          "2x1 case gave R=" + std::to_string(s.recall) + " P=" + std::to_string(s.precision) +
              " F1=" + std::to_string(s.f1));
  if (v.pass) {
    v.detail << "self-match max error " << worst_self << ", symmetry max error " << worst_sym
             << ", 2x1 case R=0.5 P=1 F1=2/3";
  }
}

void ranking(Verdict& v) {
  std::mt19937_64 rng(500);
  StubEmbedder embedder(13);
  const std::string reference = "what is the mortality rate of covid";
  std::vector<std::string> candidates;
  for (int i = 0; i < 50; ++i) candidates.push_back(random_sentence(rng, 2, 9));
  candidates.push_back(candidates[3]);  // a duplicate must keep both slots

  // Oracle: score each candidate on its own, sort by text, then stable-sort by F1.
  auto ref_seq = embedder.embed({reference}).front();
  std::vector<std::pair<std::string, double>> want;
  for (const auto& c : candidates) want.emplace_back(c, bertscore(ref_seq, embedder.embed({c}).front()).f1);
  std::sort(want.begin(), want.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::stable_sort(want.begin(), want.end(), [](auto& a, auto& b) { return a.second > b.second; });

  auto matches = [&](const std::vector<MatchCandidate>& got) {
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].candidate != want[i].first || got[i].f1 != want[i].second) return false;
    }
    return true;
  };
  v.check(matches(rank_candidates(reference, candidates, embedder, candidates.size())),
          "ordering differs from exhaustive oracle");
  for (int shuffle = 0; shuffle < 20 && v.pass; ++shuffle) {
    auto permuted = candidates;
    std::shuffle(permuted.begin(), permuted.end(), rng);
    v.check(matches(rank_candidates(reference, permuted, embedder, permuted.size())),
            "ordering changed under shuffle " + std::to_string(shuffle));
  }
  auto top3 = rank_candidates(reference, candidates, embedder, 3);
  v.check(top3.size() == 3 && top3[0].candidate == want[0].first, "top-3 truncation wrong");
  if (v.pass) v.detail << candidates.size() << " candidates ranked exactly; invariant under 20 shuffles";
}

AnnotationSheet labelled(std::size_t strong, std::size_t weak, std::size_t none) {
  AnnotationSheet sheet;
  auto add = [&](std::size_t n, MatchLabel l) {
    for (std::size_t i = 0; i < n; ++i) sheet.rows.push_back({"ref", "ctx", {}, l});
  };
  add(strong, MatchLabel::Strong);
  add(weak, MatchLabel::Weak);
  add(none, MatchLabel::None);
  return sheet;
}

void annotation(Verdict& v) {
  auto a = summarize_annotations(labelled(45, 22, 69));
  auto b = summarize_annotations(labelled(8, 5, 14));
  // Expected values are the published ones.
  v.check(a.total == 136 && a.match == 67, "first sheet counts wrong: " + a.display());
  v.check(a.match_share().percent() == 47,
          "45+22 of 136 reports match " + std::to_string(a.match) + " (" +
              std::to_string(a.match_share().percent()) + "%), published figure is 47%; 67/136 = " +
              fmt(100.0 * a.match_share().value(), 2) + "% under the nearest-integer rule");
  v.check(a.strong_share().percent() == 33, "strong share " + std::to_string(a.strong_share().percent()) + "%");
  v.check(a.weak_share().percent() == 16, "weak share " + std::to_string(a.weak_share().percent()) + "%");
  v.check(b.total == 27 && b.match == 13 && b.match_share().percent() == 48,
          "second sheet: " + b.display());
  if (v.pass) v.detail << a.display() << "; " << b.display();
}

/// Two disjoint 10-term blocks; every document draws 40 tokens from one block.
std::vector<TermDocument> planted_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TermDocument> docs;
  for (int d = 0; d < 200; ++d) {
    std::uint32_t base = d < 100 ? 0 : 10;
    TermDocument doc;
    for (int i = 0; i < 40; ++i) doc.push_back(base + static_cast<std::uint32_t>(rng() % 10));
    docs.push_back(std::move(doc));
  }
  std::shuffle(docs.begin(), docs.end(), rng);
  return docs;
}

Vocab block_vocab() {
  Vocab v;
  for (int i = 0; i < 20; ++i) {
    v.entries.push_back((i < 10 ? "a" : "b") + std::to_string(i % 10));
    v.index.emplace(v.entries.back(), static_cast<std::uint32_t>(i));
  }
  return v;
}

void lda_recovery(Verdict& v) {
  auto t0 = Clock::now();
  auto docs = planted_corpus(2024);
  auto vocab = block_vocab();
  LdaConfig cfg;
  cfg.num_topics = 2;
  cfg.iterations = 300;
  cfg.seed = 13;
  auto model = fit_lda(docs, vocab, cfg);
  double worst_purity = 1.0;
  for (std::size_t k = 0; k < 2; ++k) {
    std::size_t a = 0;
    auto top = top_terms(model, 5, k);
    for (const auto& t : top) a += t.term[0] == 'a' ? 1 : 0;
    double purity = static_cast<double>(std::max(a, top.size() - a)) / static_cast<double>(top.size());
    worst_purity = std::min(worst_purity, purity);
  }
  v.check(worst_purity >= 0.9, "top-5 block purity " + fmt(worst_purity, 2) + " < 0.9");
  double worst_sum = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    double s = 0;
    for (std::size_t w = 0; w < 20; ++w) s += model.phi_at(k, w);
    worst_sum = std::max(worst_sum, std::fabs(s - 1.0));
  }
  for (std::size_t d = 0; d < docs.size(); ++d) {
    worst_sum = std::max(worst_sum, std::fabs(model.theta_at(d, 0) + model.theta_at(d, 1) - 1.0));
  }
  v.check(worst_sum <= 1e-9, "row sums off by " + std::to_string(worst_sum));
  auto again = fit_lda(docs, vocab, cfg);
  v.check(again.phi == model.phi && again.theta == model.theta && again.assignments == model.assignments,
          "same-seed rerun is not bit-identical");
  double secs = seconds_since(t0);
  v.check(secs < 30.0, "took " + fmt(secs) + " s (limit 30 s)");
  if (v.pass) {
    v.detail << "top-5 purity " << fmt(worst_purity, 2) << ", row sums within " << worst_sum
             << ", reruns bit-identical, " << fmt(secs) << " s";
  }
}

void lda_degenerate(Verdict& v) {
  std::mt19937_64 rng(8);
  std::vector<TermDocument> docs(60);
  for (auto& d : docs) {
    d.resize(rng() % 30);
    for (auto& w : d) w = static_cast<std::uint32_t>(rng() % 20);
  }
  auto vocab = block_vocab();
  LdaConfig cfg;
  cfg.num_topics = 1;
  cfg.iterations = 50;
  auto model = fit_lda(docs, vocab, cfg);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    v.check(model.theta_at(d, 0) == 1.0, "theta[" + std::to_string(d) + "] = " + std::to_string(model.theta_at(d, 0)));
  }
  std::vector<double> counts(20, 0.0);
  double total = 0;
  for (const auto& d : docs) {
    for (auto w : d) {
      counts[w] += 1;
      total += 1;
    }
  }
  double worst = 0;
  for (std::size_t w = 0; w < 20; ++w) {
    double want = (counts[w] + cfg.beta) / (total + 20 * cfg.beta);
    worst = std::max(worst, std::fabs(model.phi_at(0, w) - want));
  }
  v.check(worst <= 1e-9, "phi differs from smoothed frequencies by " + std::to_string(worst));
  if (v.pass) v.detail << "theta == 1.0 for all " << docs.size() << " docs; phi max error " << worst;
}

void representative(Verdict& v) {
  // Three themes, two phrasings each, with hand-set frequencies.
  const std::vector<std::pair<std::string, std::size_t>> questions{
      {"what is the mortality rate of covid", 40}, {"what is the covid death rate", 12},
      {"how do vaccines induce antibodies", 9},    {"which antibodies do vaccines produce", 30},
      {"how long is the incubation period", 25},   {"what incubation period do patients show", 25}};
  const auto& stop = english_stopwords();
  std::vector<std::string> texts;
  std::vector<FrequencyEntry> freq;
  for (const auto& [q, n] : questions) {
    texts.push_back(q);
    freq.push_back({q, n, 1});
  }
  auto vocab = build_vocab(texts, 2, 1, stop);
  std::vector<TermDocument> docs;
  for (const auto& t : texts) docs.push_back(encode_text(t, vocab, stop));
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.iterations = 200;
  auto model = fit_lda(docs, vocab, cfg);
  model.doc_labels = texts;

  auto hand = [&](const std::vector<FrequencyEntry>& table) {
    std::vector<std::string> best(3);
    for (std::size_t k = 0; k < 3; ++k) {
      double top = -1;
      for (std::size_t d = 0; d < texts.size(); ++d) {
        double score = static_cast<double>(table[d].span_count) * model.theta_at(d, k);
        if (score > top || (score == top && texts[d] < best[k])) {
          top = score;
          best[k] = texts[d];
        }
      }
    }
    return best;
  };
  auto check = [&](const std::vector<FrequencyEntry>& table, const std::string& label) {
    auto reps = representative_questions(model, table);
    auto want = hand(table);
    v.check(reps.size() == 3, label + ": wrong number of topics");
    for (std::size_t k = 0; k < reps.size() && k < 3; ++k) {
      v.check(reps[k].question == want[k], label + ": topic " + std::to_string(k + 1) + " picked '" +
                                               reps[k].question + "', hand computation '" + want[k] + "'");
    }
    return reps;
  };
  auto base = check(freq, "fitted model");
  auto doubled = freq;
  for (auto& e : doubled) e.span_count *= 2;
  auto twice = check(doubled, "doubled counts");
  for (std::size_t k = 0; k < base.size() && k < twice.size(); ++k) {
    v.check(base[k].question == twice[k].question, "doubling span_counts changed topic " + std::to_string(k + 1));
  }

  // Hand-set theta: every score is computed by hand.
  TopicModel fixed;
  fixed.num_topics = 3;
  fixed.num_docs = 3;
  fixed.doc_labels = {"q1", "q2", "q3"};
  fixed.theta = {0.6, 0.3, 0.1,   //
                 0.2, 0.2, 0.6,   //
                 0.1, 0.8, 0.1};
  // span counts 10, 20, 5 -> scores per topic: {6, 4, 0.5}, {3, 4, 4}, {1, 12, 0.5}
  std::vector<FrequencyEntry> table{{"q1", 10, 1}, {"q2", 20, 1}, {"q3", 5, 1}};
  auto reps = representative_questions(fixed, table);
  v.check(reps.size() == 3 && reps[0].question == "q1" && reps[1].question == "q2" && reps[2].question == "q2",
          "hand-set theta case picked the wrong questions");
  v.check(reps.size() == 3 && std::fabs(reps[2].score - 12.0) < 1e-12, "hand-set score wrong");
  if (v.pass) {
    v.detail << "fitted 3-topic model and hand-set theta agree with hand computation; doubling counts keeps picks";
  }
}

void end_to_end(Verdict& v) {
  auto t0 = Clock::now();
  testing::TempDir dir;
  write_corpus(dir.file("corpus.jsonl"), testing::synthetic_corpus(20, 1234));
  testing::write_text(dir.file("gold.jsonl"),
                      "{\"question\":\"what is covid\"}\n"
                      "{\"question\":\"how does the vaccine reduce hospital admissions\"}\n"
                      "{\"question\":\"what is the incubation period\"}\n");
  auto config = [&](const std::string& workdir) {
    PipelineConfig cfg;
    cfg.input = dir.file("corpus.jsonl");
    cfg.workdir = dir.file(workdir);
    cfg.window = WindowConfig{4, 2, 2};
    cfg.min_docs = 2;
    cfg.groups = {{"vaccine", {"vaccine"}}, {"transmission", {"transmission", "viral"}}};
    cfg.gold_path = dir.file("gold.jsonl");
    cfg.embedder = "stub";
    cfg.backend = "mock";
    return cfg;
  };
  auto first = run_pipeline(config("a"));
  auto second = run_pipeline(config("b"));
  PipelineOptions stop;
  stop.stop_after = "postprocess";
  auto partial = run_pipeline(config("c"), stop);
  auto resumed = run_pipeline(config("c"));
  v.check(first.exit_code == 0 && second.exit_code == 0 && partial.exit_code == 0 && resumed.exit_code == 0,
          "a run failed: " + first.error + second.error + partial.error + resumed.error);
  std::size_t resumed_stages = 0;
  for (const auto& s : resumed.manifest.stages()) resumed_stages += s.status == "resumed" ? 1 : 0;
  v.check(resumed_stages == 4, "expected 4 resumed stages, got " + std::to_string(resumed_stages));

  std::size_t compared = 0, bytes = 0;
  for (const auto& entry : fs::directory_iterator(dir.file("a"))) {
    auto name = entry.path().filename().string();
    auto ext = entry.path().extension().string();
    if (ext != ".csv" && ext != ".jsonl") continue;
    auto a = testing::read_text(dir.file("a/" + name));
    v.check(fs::exists(dir.file("b/" + name)) && a == testing::read_text(dir.file("b/" + name)),
            name + " differs between two runs");
    v.check(fs::exists(dir.file("c/" + name)) && a == testing::read_text(dir.file("c/" + name)),
            name + " differs after resume");
    ++compared;
    bytes += a.size();
  }
  v.check(compared == 8, "expected 8 artifacts, found " + std::to_string(compared));
  v.check(first.manifest.count("sheet_rows") == 3u, "frequent-question sheet incomplete");
  double secs = seconds_since(t0);
  v.check(secs < 10.0, "took " + fmt(secs) + " s (limit 10 s)");
  if (v.pass) {
    v.detail << compared << " artifacts (" << bytes << " bytes) identical across 2 runs and a resume; "
             << fmt(secs) << " s";
  }
}

void timeseries(Verdict& v) {
  auto rec = [](std::string q, std::optional<Date> d) {
    return QuestionRecord{std::move(q), "doc", 0, d, "mock"};
  };
  std::vector<QuestionRecord> records{
      rec("what is the incubation period for covid", parse_date("2020-03-15")),
      rec("what is the incubation period", parse_date("2020-03-02")),
      rec("how effective are masks", parse_date("2019-11-30")),
      rec("do masks reduce the incubation period", parse_date("2020-06-01")),
      rec("what is the incubation period", std::nullopt),
      rec("how effective are masks", std::nullopt),
      rec("how effective are masks", std::nullopt),
      rec("what is the mortality rate", parse_date("2020-01-20"))};
  KeywordGroups groups{{"incubation period", {"incubation period"}},
                       {"masks", {"masks", "face covering"}},
                       {"vaccine", {"vaccine"}}};
  auto got = keyword_group_series(records, groups);

  // Hand bucketing over 2019-11 .. 2020-06 (8 months).
  auto series = [](std::string label, std::vector<std::size_t> counts, std::size_t undated) {
    TimeBucketSeries s{std::move(label), {}, undated};
    YearMonth m{2019, 11};
    for (auto c : counts) {
      s.buckets.push_back({m, c});
      m = m.next();
    }
    return s;
  };
  std::vector<TimeBucketSeries> want{series("incubation period", {0, 0, 0, 0, 2, 0, 0, 1}, 1),
                                     series("masks", {1, 0, 0, 0, 0, 0, 0, 1}, 2),
                                     series("vaccine", {0, 0, 0, 0, 0, 0, 0, 0}, 0)};
  v.check(got == want, "series differ from hand-bucketed counts");
  auto empty = keyword_group_series({}, groups);
  v.check(empty.size() == 3 && std::all_of(empty.begin(), empty.end(),
                                           [](const auto& s) { return s.buckets.empty() && s.undated == 0; }),
          "empty input must give empty series");
  if (v.pass) v.detail << "3 groups x 8 months incl. zero-filled months and undated counts match";
}

const std::vector<std::pair<std::string, std::function<void(Verdict&)>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> all{
      {"windowing", windowing},         {"aggregation", aggregation},
      {"doc_frequency", doc_frequency}, {"bertscore", bertscore_criterion},
      {"ranking", ranking},             {"annotation", annotation},
      {"lda_recovery", lda_recovery},   {"lda_degenerate", lda_degenerate},
      {"representative", representative}, {"end_to_end", end_to_end},
      {"timeseries", timeseries}};
  return all;
}

}  // namespace
}  // namespace qscope::acceptance

int main(int argc, char** argv) {
  using namespace qscope::acceptance;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: " << argv[0] << " [--criterion NAME]\n";
      return 2;
    }
  }
  int failures = 0;
  bool found = only.empty();
  for (const auto& [name, fn] : criteria()) {
    if (!only.empty() && name != only) continue;
    found = true;
    Verdict v;
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail.str() << std::endl;
    failures += v.pass ? 0 : 1;
  }
  if (!found) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
