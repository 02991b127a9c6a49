#include "qscope/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "http_client.hpp"
#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

TokenEmbeddingSeq::TokenEmbeddingSeq(std::vector<std::string> tokens,
                                     const std::vector<std::vector<double>>& vectors)
    : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw InvalidArgument("token embedding sequence is empty");
  if (tokens_.size() != vectors.size()) {
    throw InvalidArgument("token embedding sequence: " + std::to_string(tokens_.size()) +
                          " tokens but " + std::to_string(vectors.size()) + " vectors");
  }
  dim_ = vectors.front().size();
  if (dim_ == 0) throw InvalidArgument("token embedding sequence: zero-dimensional vectors");
  values_.reserve(tokens_.size() * dim_);
  for (const auto& v : vectors) {
    if (v.size() != dim_) throw InvalidArgument("token embedding sequence: mixed dimensions");
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InvalidArgument("token embedding sequence: zero or non-finite vector");
    }
    for (double x : v) values_.push_back(x / norm);
  }
}

StubEmbedder::StubEmbedder(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("stub embedder dimension must be >= 1");
}

std::vector<double> StubEmbedder::token_vector(std::string_view token) const {
  std::mt19937_64 gen(fnv1a64(token) ^ (seed_ * 0x9e3779b97f4a7c15ULL));
  std::vector<double> v(dim_);
  for (auto& x : v) {
    // 53 random bits mapped onto [-1, 1).
    x = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
  return v;
}

std::vector<TokenEmbeddingSeq> StubEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<TokenEmbeddingSeq> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto tokens = word_tokens(text);
    if (tokens.empty()) throw InvalidArgument("cannot embed text without tokens: '" + text + "'");
    std::vector<std::vector<double>> vectors;
    vectors.reserve(tokens.size());
    for (const auto& t : tokens) vectors.push_back(token_vector(t));
    out.emplace_back(std::move(tokens), vectors);
  }
  return out;
}

std::string encode_embed_request(const std::vector<std::string>& texts) {
  json j;
  j["texts"] = texts;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<TokenEmbeddingSeq> decode_embed_response(std::string_view body, std::size_t expected) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw BackendError(std::string("embed: response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("tokens") || !j.contains("vectors") ||
      !j["tokens"].is_array() || !j["vectors"].is_array()) {
    throw BackendError("embed: response needs 'tokens' and 'vectors' arrays");
  }
  const auto& tokens = j["tokens"];
  const auto& vectors = j["vectors"];
  if (tokens.size() != expected || vectors.size() != expected) {
    throw BackendError("embed: expected " + std::to_string(expected) + " results, got " +
                       std::to_string(tokens.size()) + " token lists and " +
                       std::to_string(vectors.size()) + " vector lists");
  }
  std::vector<TokenEmbeddingSeq> out;
  out.reserve(expected);
  try {
    for (std::size_t i = 0; i < expected; ++i) {
      out.emplace_back(tokens[i].get<std::vector<std::string>>(),
                       vectors[i].get<std::vector<std::vector<double>>>());
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("embed: malformed result: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw BackendError(std::string("embed: ") + e.what());
  }
  return out;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::size_t batch_size, double timeout_seconds)
    : endpoint_(std::move(endpoint)), batch_size_(batch_size), timeout_seconds_(timeout_seconds) {
  if (endpoint_.empty()) throw InvalidArgument("remote embedder needs an endpoint");
  if (batch_size_ == 0) throw InvalidArgument("remote embedder batch size must be >= 1");
}

std::vector<TokenEmbeddingSeq> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<TokenEmbeddingSeq> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += batch_size_) {
    std::vector<std::string> batch(texts.begin() + begin,
                                   texts.begin() + std::min(texts.size(), begin + batch_size_));
    auto body = detail::post_json(endpoint_, "/embed", encode_embed_request(batch), timeout_seconds_);
    auto decoded = decode_embed_response(body, batch.size());
    std::move(decoded.begin(), decoded.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace qscope
