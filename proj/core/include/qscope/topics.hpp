#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qscope/aggregate.hpp"
#include "qscope/stopwords.hpp"

namespace qscope {

/// Lowercased word tokens with stopwords removed.
std::vector<std::string> content_tokens(std::string_view text, const StopwordSet& stopwords);

/// All n-grams for n in [1, max_n], words joined by '_', ordered by start
/// position then length.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::size_t max_n);

/// N-gram vocabulary with dense ids. Entries are ordered by corpus count
/// descending, then term ascending.
struct Vocab {
  std::vector<std::string> entries;
  std::unordered_map<std::string, std::uint32_t> index;
  std::size_t min_count = 1;
  std::size_t max_n = 1;

  std::size_t size() const { return entries.size(); }
  std::optional<std::uint32_t> id(const std::string& term) const;
  bool contains(const std::string& term) const { return index.contains(term); }
};

/// Throws InvalidArgument when max_n == 0.
Vocab build_vocab(const std::vector<std::string>& texts, std::size_t max_n,
                  std::size_t min_count, const StopwordSet& stopwords);

/// Vocabulary ids of every in-vocabulary n-gram occurrence of `text`.
std::vector<std::uint32_t> encode_text(std::string_view text, const Vocab& vocab,
                                       const StopwordSet& stopwords);

using TermDocument = std::vector<std::uint32_t>;

struct LdaConfig {
  std::size_t num_topics = 20;
  std::optional<double> alpha;  // defaults to 50 / num_topics
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::uint64_t seed = 13;

  double resolved_alpha() const {
    return alpha ? *alpha : 50.0 / static_cast<double>(num_topics);
  }
};

/// Collapsed Gibbs sampler state. One instance is single-threaded and fully
/// determined by (documents, vocabulary size, config).
class LdaSampler {
 public:
  LdaSampler(const std::vector<TermDocument>& docs, std::size_t vocab_size, const LdaConfig& cfg);

  void sweep();

  std::size_t num_topics() const { return k_; }
  std::size_t vocab_size() const { return v_; }
  std::size_t num_docs() const { return assignments_.size(); }
  std::size_t num_tokens() const { return num_tokens_; }

  const std::vector<std::vector<std::uint32_t>>& assignments() const { return assignments_; }
  const std::vector<std::size_t>& topic_totals() const { return topic_totals_; }

  /// (n_kw + beta) / (n_k + V beta), row-major K x V.
  std::vector<double> phi() const;
  /// (n_dk + alpha) / (n_d + K alpha), row-major D x K.
  std::vector<double> theta() const;

 private:
  std::vector<TermDocument> docs_;
  std::size_t k_;
  std::size_t v_;
  double alpha_;
  double beta_;
  std::size_t num_tokens_ = 0;
  std::mt19937_64 rng_;
  std::vector<std::vector<std::uint32_t>> assignments_;
  std::vector<std::size_t> doc_topic_;   // D x K
  std::vector<std::size_t> topic_word_;  // K x V
  std::vector<std::size_t> topic_totals_;
  std::vector<double> weights_;
};

struct TopicModel {
  std::size_t num_topics = 0;
  std::size_t num_docs = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::size_t max_n = 1;
  std::vector<std::string> vocabulary;
  std::vector<double> phi;    // num_topics x vocabulary.size()
  std::vector<double> theta;  // num_docs x num_topics
  std::vector<std::vector<std::uint32_t>> assignments;
  std::vector<std::size_t> skipped_docs;  // no in-vocabulary tokens
  std::vector<std::string> doc_labels;    // optional, one per document

  std::size_t vocab_size() const { return vocabulary.size(); }
  double phi_at(std::size_t topic, std::size_t term) const {
    return phi[topic * vocabulary.size() + term];
  }
  double theta_at(std::size_t doc, std::size_t topic) const {
    return theta[doc * num_topics + topic];
  }
};

/// Runs cfg.iterations Gibbs sweeps and reports the final-state point
/// estimates. Documents without tokens stay in theta (uniform row) and are
/// listed in skipped_docs. Throws InvalidArgument for an empty vocabulary or
/// num_topics == 0.
TopicModel fit_lda(const std::vector<TermDocument>& docs, const Vocab& vocab, const LdaConfig& cfg);

struct WeightedTerm {
  std::string term;
  double weight = 0.0;

  bool operator==(const WeightedTerm&) const = default;
};

/// Top-k terms of `topic` by phi, ties by term ascending.
std::vector<WeightedTerm> top_terms(const TopicModel& model, std::size_t k, std::size_t topic);

struct RepresentativeQuestion {
  std::size_t topic = 0;
  std::string question;
  double score = 0.0;  // span_count * theta
};

/// For each topic, the question maximising span_count(q) * theta[q][topic]
/// over the model's documents (doc_labels are the questions). Ties go to the
/// lexicographically smaller question; questions missing from `freq` score 0.
std::vector<RepresentativeQuestion> representative_questions(
    const TopicModel& model, const std::vector<FrequencyEntry>& freq);

struct NgramCount {
  std::string ngram;
  std::size_t count = 0;

  bool operator==(const NgramCount&) const = default;
};

/// Top-k n-grams (n <= max_n) by raw count after stopword removal, ties by
/// n-gram ascending. Word-cloud input.
std::vector<NgramCount> ngram_frequencies(const std::vector<std::string>& texts, std::size_t max_n,
                                          const StopwordSet& stopwords, std::size_t top_k);

void save_topic_model(const std::string& path, const TopicModel& model);
TopicModel load_topic_model(const std::string& path);

}  // namespace qscope
