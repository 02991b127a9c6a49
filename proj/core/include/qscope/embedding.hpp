#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qscope {

/// Tokens of one text with one unit-length vector per token.
class TokenEmbeddingSeq {
 public:
  /// Normalises each vector to unit length. Throws InvalidArgument when the
  /// sequence is empty, lengths or dimensions disagree, or a vector is zero.
  TokenEmbeddingSeq(std::vector<std::string> tokens, const std::vector<std::vector<double>>& vectors);

  std::size_t size() const { return tokens_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::span<const double> vector(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }

 private:
  std::vector<std::string> tokens_;
  std::size_t dim_ = 0;
  std::vector<double> values_;  // row-major, size() x dim()
};

/// Produces token embeddings. Must tolerate concurrent calls.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<TokenEmbeddingSeq> embed(const std::vector<std::string>& texts) = 0;
};

/// Offline embedder: every token maps to a pseudo-random unit vector seeded
/// by a stable hash of (seed, token). Equal strings embed identically, so
/// they score 1.0 against each other.
class StubEmbedder final : public EmbeddingBackend {
 public:
  explicit StubEmbedder(std::uint64_t seed = 0, std::size_t dim = 64);
  std::vector<TokenEmbeddingSeq> embed(const std::vector<std::string>& texts) override;

  std::vector<double> token_vector(std::string_view token) const;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

/// HTTP client for `POST {endpoint}/embed`.
///
/// Request  {"texts": [...]}
/// Response {"tokens": [[...], ...], "vectors": [[[...], ...], ...]}
/// Texts are sent in batches of `batch_size`.
class RemoteEmbedder final : public EmbeddingBackend {
 public:
  explicit RemoteEmbedder(std::string endpoint, std::size_t batch_size = 64,
                          double timeout_seconds = 120.0);
  std::vector<TokenEmbeddingSeq> embed(const std::vector<std::string>& texts) override;

 private:
  std::string endpoint_;
  std::size_t batch_size_;
  double timeout_seconds_;
};

std::string encode_embed_request(const std::vector<std::string>& texts);
std::vector<TokenEmbeddingSeq> decode_embed_response(std::string_view body, std::size_t expected);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace qscope
