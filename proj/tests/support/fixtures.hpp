#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qscope/corpus.hpp"
#include "qscope/generation.hpp"

namespace httplib {
class Server;
}

namespace qscope::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// Deterministic pandemic-flavoured corpus: `n` documents with two to four
/// multi-sentence passages each; every fifth document is undated.
std::vector<Document> synthetic_corpus(std::size_t n, std::uint64_t seed);

/// Random records over a small question/doc alphabet, so repeats are common.
std::vector<QuestionRecord> random_records(std::size_t n, std::mt19937_64& rng,
                                           std::size_t questions = 25, std::size_t docs = 12);

/// In-process HTTP server on 127.0.0.1 and an ephemeral port, stopped on
/// destruction. Handlers receive the raw request body and return
/// (status, body).
class FakeService {
 public:
  using Handler = std::function<std::pair<int, std::string>(const std::string& body)>;

  FakeService();
  ~FakeService();
  FakeService(const FakeService&) = delete;
  FakeService& operator=(const FakeService&) = delete;

  void route(const std::string& path, Handler handler);
  /// Starts listening; call after all routes are registered.
  void start();
  std::string endpoint() const;

 private:
  std::unique_ptr<httplib::Server> server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace qscope::testing
