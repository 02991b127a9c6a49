#include "qscope/topics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

using nlohmann::json;

std::vector<std::string> content_tokens(std::string_view text, const StopwordSet& stopwords) {
  auto tokens = word_tokens(text);
  std::erase_if(tokens, [&stopwords](const std::string& t) { return stopwords.contains(t); });
  return tokens;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::size_t max_n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string gram;
    for (std::size_t n = 1; n <= max_n && i + n <= tokens.size(); ++n) {
      if (n > 1) gram.push_back('_');
      gram += tokens[i + n - 1];
      out.push_back(gram);
    }
  }
  return out;
}

std::optional<std::uint32_t> Vocab::id(const std::string& term) const {
  auto it = index.find(term);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

namespace {

std::map<std::string, std::size_t> count_ngrams(const std::vector<std::string>& texts,
                                                std::size_t max_n, const StopwordSet& stopwords) {
  std::map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    for (auto& g : ngrams(content_tokens(text, stopwords), max_n)) ++counts[g];
  }
  return counts;
}

// Count descending, then term ascending.
template <typename Entry>
void sort_by_count(std::vector<Entry>& entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.count > b.count; });
}

}  // namespace

Vocab build_vocab(const std::vector<std::string>& texts, std::size_t max_n, std::size_t min_count,
                  const StopwordSet& stopwords) {
  if (max_n == 0) throw InvalidArgument("build_vocab: max_n must be >= 1");
  std::vector<NgramCount> kept;
  for (auto& [gram, n] : count_ngrams(texts, max_n, stopwords)) {
    if (n >= min_count) kept.push_back({gram, n});
  }
  sort_by_count(kept);
  Vocab vocab;
  vocab.min_count = min_count;
  vocab.max_n = max_n;
  for (auto& e : kept) {
    vocab.index.emplace(e.ngram, static_cast<std::uint32_t>(vocab.entries.size()));
    vocab.entries.push_back(std::move(e.ngram));
  }
  return vocab;
}

std::vector<std::uint32_t> encode_text(std::string_view text, const Vocab& vocab,
                                       const StopwordSet& stopwords) {
  std::vector<std::uint32_t> ids;
  for (const auto& g : ngrams(content_tokens(text, stopwords), vocab.max_n)) {
    if (auto id = vocab.id(g)) ids.push_back(*id);
  }
  return ids;
}

LdaSampler::LdaSampler(const std::vector<TermDocument>& docs, std::size_t vocab_size,
                       const LdaConfig& cfg)
    : docs_(docs),
      k_(cfg.num_topics),
      v_(vocab_size),
      alpha_(cfg.resolved_alpha()),
      beta_(cfg.beta),
      rng_(cfg.seed) {
  if (k_ == 0) throw InvalidArgument("LDA needs at least one topic");
  if (v_ == 0) throw InvalidArgument("LDA needs a non-empty vocabulary");
  if (!(alpha_ > 0.0) || !(beta_ > 0.0)) throw InvalidArgument("LDA alpha and beta must be > 0");

  doc_topic_.assign(docs_.size() * k_, 0);
  topic_word_.assign(k_ * v_, 0);
  topic_totals_.assign(k_, 0);
  weights_.assign(k_, 0.0);
  assignments_.resize(docs_.size());

  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(k_ - 1));
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    assignments_[d].reserve(docs_[d].size());
    for (auto w : docs_[d]) {
      if (w >= v_) throw InvalidArgument("LDA: term id out of vocabulary range");
      auto z = pick(rng_);
      assignments_[d].push_back(z);
      ++doc_topic_[d * k_ + z];
      ++topic_word_[z * v_ + w];
      ++topic_totals_[z];
      ++num_tokens_;
    }
  }
}

void LdaSampler::sweep() {
  const double v_beta = static_cast<double>(v_) * beta_;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    auto* dt = &doc_topic_[d * k_];
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const auto w = docs_[d][i];
      auto z = assignments_[d][i];
      --dt[z];
      --topic_word_[z * v_ + w];
      --topic_totals_[z];

      double total = 0.0;
      for (std::size_t k = 0; k < k_; ++k) {
        total += (static_cast<double>(dt[k]) + alpha_) *
                 (static_cast<double>(topic_word_[k * v_ + w]) + beta_) /
                 (static_cast<double>(topic_totals_[k]) + v_beta);
        weights_[k] = total;
      }
      const double u = unit(rng_) * total;
      std::size_t k = 0;
      while (k + 1 < k_ && weights_[k] <= u) ++k;

      z = static_cast<std::uint32_t>(k);
      assignments_[d][i] = z;
      ++dt[z];
      ++topic_word_[z * v_ + w];
      ++topic_totals_[z];
    }
  }
}

std::vector<double> LdaSampler::phi() const {
  std::vector<double> phi(k_ * v_);
  const double v_beta = static_cast<double>(v_) * beta_;
  for (std::size_t k = 0; k < k_; ++k) {
    const double denom = static_cast<double>(topic_totals_[k]) + v_beta;
    for (std::size_t w = 0; w < v_; ++w) {
      phi[k * v_ + w] = (static_cast<double>(topic_word_[k * v_ + w]) + beta_) / denom;
    }
  }
  return phi;
}

std::vector<double> LdaSampler::theta() const {
  std::vector<double> theta(docs_.size() * k_);
  const double k_alpha = static_cast<double>(k_) * alpha_;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const double denom = static_cast<double>(docs_[d].size()) + k_alpha;
    for (std::size_t k = 0; k < k_; ++k) {
      theta[d * k_ + k] = (static_cast<double>(doc_topic_[d * k_ + k]) + alpha_) / denom;
    }
  }
  return theta;
}

TopicModel fit_lda(const std::vector<TermDocument>& docs, const Vocab& vocab, const LdaConfig& cfg) {
  if (vocab.size() == 0) throw InvalidArgument("fit_lda: vocabulary is empty");
  LdaSampler sampler(docs, vocab.size(), cfg);
  for (std::size_t it = 0; it < cfg.iterations; ++it) sampler.sweep();

  TopicModel model;
  model.num_topics = cfg.num_topics;
  model.num_docs = docs.size();
  model.alpha = cfg.resolved_alpha();
  model.beta = cfg.beta;
  model.iterations = cfg.iterations;
  model.seed = cfg.seed;
  model.max_n = vocab.max_n;
  model.vocabulary = vocab.entries;
  model.phi = sampler.phi();
  model.theta = sampler.theta();
  model.assignments = sampler.assignments();
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].empty()) model.skipped_docs.push_back(d);
  }
  return model;
}

std::vector<WeightedTerm> top_terms(const TopicModel& model, std::size_t k, std::size_t topic) {
  if (topic >= model.num_topics) throw InvalidArgument("top_terms: topic id out of range");
  std::vector<std::size_t> order(model.vocab_size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      double pa = model.phi_at(topic, a), pb = model.phi_at(topic, b);
                      if (pa != pb) return pa > pb;
                      return model.vocabulary[a] < model.vocabulary[b];
                    });
  std::vector<WeightedTerm> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({model.vocabulary[order[i]], model.phi_at(topic, order[i])});
  }
  return out;
}

std::vector<RepresentativeQuestion> representative_questions(
    const TopicModel& model, const std::vector<FrequencyEntry>& freq) {
  if (model.doc_labels.size() != model.num_docs) {
    throw InvalidArgument("representative_questions: model documents carry no question labels");
  }
  std::map<std::string, std::size_t> span_count;
  for (const auto& e : freq) span_count[e.question] = e.span_count;

  std::vector<RepresentativeQuestion> out;
  for (std::size_t k = 0; k < model.num_topics; ++k) {
    RepresentativeQuestion best{k, {}, -1.0};
    for (std::size_t d = 0; d < model.num_docs; ++d) {
      const auto& q = model.doc_labels[d];
      auto it = span_count.find(q);
      double score = it == span_count.end()
                         ? 0.0
                         : static_cast<double>(it->second) * model.theta_at(d, k);
      if (score > best.score || (score == best.score && q < best.question)) {
        best.question = q;
        best.score = score;
      }
    }
    out.push_back(std::move(best));
  }
  return out;
}

std::vector<NgramCount> ngram_frequencies(const std::vector<std::string>& texts, std::size_t max_n,
                                          const StopwordSet& stopwords, std::size_t top_k) {
  if (max_n == 0) throw InvalidArgument("ngram_frequencies: max_n must be >= 1");
  std::vector<NgramCount> out;
  for (auto& [gram, n] : count_ngrams(texts, max_n, stopwords)) out.push_back({gram, n});
  sort_by_count(out);
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

void save_topic_model(const std::string& path, const TopicModel& model) {
  json j;
  j["num_topics"] = model.num_topics;
  j["num_docs"] = model.num_docs;
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["iterations"] = model.iterations;
  j["seed"] = model.seed;
  j["ngrams"] = model.max_n;
  j["vocab"] = model.vocabulary;
  j["phi"] = model.phi;
  j["theta"] = model.theta;
  j["skipped_docs"] = model.skipped_docs;
  j["doc_labels"] = model.doc_labels;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write topic model: " + path);
  out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

TopicModel load_topic_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topic model: " + path);
  TopicModel m;
  try {
    auto j = json::parse(in);
    m.num_topics = j.at("num_topics").get<std::size_t>();
    m.num_docs = j.at("num_docs").get<std::size_t>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.max_n = j.value("ngrams", std::size_t{1});
    m.vocabulary = j.at("vocab").get<std::vector<std::string>>();
    m.phi = j.at("phi").get<std::vector<double>>();
    m.theta = j.at("theta").get<std::vector<double>>();
    m.skipped_docs = j.value("skipped_docs", std::vector<std::size_t>{});
    m.doc_labels = j.value("doc_labels", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (m.phi.size() != m.num_topics * m.vocabulary.size() ||
      m.theta.size() != m.num_docs * m.num_topics) {
    throw ParseError(path + ": phi/theta sizes disagree with num_topics, vocab and num_docs");
  }
  return m;
}

}  // namespace qscope
