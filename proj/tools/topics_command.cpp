#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "commands.hpp"
#include "qscope/aggregate.hpp"
#include "qscope/error.hpp"
#include "qscope/preprocess.hpp"
#include "qscope/stopwords.hpp"
#include "qscope/text.hpp"
#include "qscope/topics.hpp"

namespace qscope::cli {

namespace {

struct LabelledTexts {
  std::vector<std::string> labels;
  std::vector<std::string> texts;
};

// Accepts corpus documents, spans or question records, one per line. Each
// distinct question becomes one document; a corpus document contributes its
// cleaned title and passages.
LabelledTexts read_texts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  LabelledTexts out;
  std::set<std::string> seen_questions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("question")) {
      auto q = j["question"].get<std::string>();
      if (seen_questions.insert(q).second) {
        out.labels.push_back(q);
        out.texts.push_back(q);
      }
    } else if (j.contains("passages")) {
      std::string text = clean_text(j.value("title", std::string{}));
      for (const auto& p : j["passages"]) text += " " + clean_text(p.get<std::string>());
      out.labels.push_back(j.value("doc_id", std::string{}));
      out.texts.push_back(std::move(text));
    } else if (j.contains("text")) {
      out.labels.push_back(j.value("doc_id", std::string{}) + "#" +
                           std::to_string(j.value("span_index", std::size_t{0})));
      out.texts.push_back(j["text"].get<std::string>());
    } else {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected a question, document or span record");
    }
  }
  return out;
}

StopwordSet stopwords_from(const std::string& path) {
  return path.empty() ? english_stopwords() : load_stopwords(path);
}

}  // namespace

void add_topics_command(CLI::App& app, const std::uint64_t& seed) {
  auto* topics = app.add_subcommand("topics", "LDA and n-gram baselines");
  topics->require_subcommand(1);

  struct FitArgs {
    std::string input, out, stopwords;
    std::size_t k = 20, ngrams = 3, iters = 1000, min_count = 2;
    std::optional<double> alpha;
    double beta = 0.01;
  };
  auto fit_args = std::make_shared<FitArgs>();
  auto* fit = topics->add_subcommand("fit", "Fit collapsed-Gibbs LDA over n-gram tokens");
  fit->add_option("--input", fit_args->input, "Corpus, span or question JSON lines")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_args->out, "Model JSON")->required();
  fit->add_option("--k", fit_args->k, "Topics")->capture_default_str();
  fit->add_option("--ngrams", fit_args->ngrams, "Max n-gram order")->capture_default_str()->check(CLI::Range(1, 3));
  fit->add_option("--iters", fit_args->iters, "Gibbs sweeps")->capture_default_str();
  fit->add_option("--min-count", fit_args->min_count, "Minimum n-gram count")->capture_default_str();
  fit->add_option("--alpha", fit_args->alpha, "Document-topic prior (default 50/k)");
  fit->add_option("--beta", fit_args->beta, "Topic-term prior")->capture_default_str();
  fit->add_option("--stopwords", fit_args->stopwords, "Stopword file (default: shipped list)");
  fit->callback([fit_args, &seed] {
    auto data = read_texts(fit_args->input);
    auto stop = stopwords_from(fit_args->stopwords);
    auto vocab = build_vocab(data.texts, fit_args->ngrams, fit_args->min_count, stop);
    std::vector<TermDocument> docs;
    docs.reserve(data.texts.size());
    for (const auto& t : data.texts) docs.push_back(encode_text(t, vocab, stop));
    LdaConfig cfg;
    cfg.num_topics = fit_args->k;
    cfg.alpha = fit_args->alpha;
    cfg.beta = fit_args->beta;
    cfg.iterations = fit_args->iters;
    cfg.seed = seed;
    auto model = fit_lda(docs, vocab, cfg);
    model.doc_labels = std::move(data.labels);
    save_topic_model(fit_args->out, model);
    std::cerr << "documents " << docs.size() << ", vocabulary " << vocab.size() << ", skipped "
              << model.skipped_docs.size() << '\n';
  });

  struct ReportArgs {
    std::string model;
    std::size_t top_terms = 5;
    std::vector<std::size_t> drop;
  };
  auto report_args = std::make_shared<ReportArgs>();
  auto* report = topics->add_subcommand("report", "Top terms per topic");
  report->add_option("--model", report_args->model, "Model JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--top-terms", report_args->top_terms, "Terms per topic")->capture_default_str();
  report->add_option("--drop-topics", report_args->drop, "1-based topic numbers to hide")->delimiter(',');
  report->callback([report_args] {
    auto model = load_topic_model(report_args->model);
    std::set<std::size_t> drop(report_args->drop.begin(), report_args->drop.end());
    for (std::size_t t = 0; t < model.num_topics; ++t) {
      if (drop.contains(t + 1)) continue;
      std::cout << (t + 1);
      for (const auto& w : top_terms(model, report_args->top_terms, t)) std::cout << ' ' << w.term;
      std::cout << '\n';
    }
  });

  struct QuestionArgs {
    std::string model, freq;
    std::vector<std::size_t> drop;
  };
  auto q_args = std::make_shared<QuestionArgs>();
  auto* questions = topics->add_subcommand("questions", "Representative question per topic");
  questions->add_option("--model", q_args->model, "Model fitted over questions")->required()->check(CLI::ExistingFile);
  questions->add_option("--freq", q_args->freq, "Frequency CSV over all questions")->required()->check(CLI::ExistingFile);
  questions->add_option("--drop-topics", q_args->drop, "1-based topic numbers to skip")->delimiter(',');
  questions->callback([q_args] {
    auto model = load_topic_model(q_args->model);
    std::set<std::size_t> drop(q_args->drop.begin(), q_args->drop.end());
    for (const auto& r : representative_questions(model, read_frequency_csv(q_args->freq))) {
      if (drop.contains(r.topic + 1)) continue;
      std::cout << (r.topic + 1) << '\t';
      for (const auto& w : top_terms(model, 5, r.topic)) std::cout << w.term << ' ';
      std::cout << '\t' << r.question << '\n';
    }
  });

  struct NgramArgs {
    std::string input, output, stopwords;
    std::size_t ngrams = 3, top = 200;
  };
  auto n_args = std::make_shared<NgramArgs>();
  auto* ngrams = topics->add_subcommand("ngrams", "Weighted n-grams for a word cloud");
  ngrams->add_option("--input", n_args->input, "Corpus, span or question JSON lines")->required()->check(CLI::ExistingFile);
  ngrams->add_option("--output", n_args->output, "CSV ngram,count")->required();
  ngrams->add_option("--ngrams", n_args->ngrams, "Max n-gram order")->capture_default_str()->check(CLI::Range(1, 3));
  ngrams->add_option("--top", n_args->top, "Rows to keep")->capture_default_str();
  ngrams->add_option("--stopwords", n_args->stopwords, "Stopword file (default: shipped list)");
  ngrams->callback([n_args] {
    auto data = read_texts(n_args->input);
    auto counts = ngram_frequencies(data.texts, n_args->ngrams, stopwords_from(n_args->stopwords), n_args->top);
    std::ofstream out(n_args->output, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + n_args->output);
    out << "ngram,count\n";
    for (const auto& c : counts) out << c.ngram << ',' << c.count << '\n';
  });
}

}  // namespace qscope::cli
