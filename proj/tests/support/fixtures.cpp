#include "support/fixtures.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qscope::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto name = "qscope-test-" + std::to_string(rd()) + "-" + std::to_string(counter++);
    auto candidate = fs::temp_directory_path() / name;
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const std::vector<std::string> kSubjects{
    "Covid", "The vaccine", "Transmission", "Hospital capacity", "Mask policy",
    "The virus", "Antibody testing", "Lockdown", "Contact tracing", "Viral load"};
const std::vector<std::string> kVerbs{
    "affects", "reduces", "changes", "predicts", "increases", "limits"};
const std::vector<std::string> kObjects{
    "mortality in older patients", "household transmission", "hospital admissions",
    "symptom onset", "vaccine uptake", "school closures", "viral shedding",
    "case counts"};

}  // namespace

std::vector<Document> synthetic_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    Document d;
    d.doc_id = "doc" + std::to_string(i + 1);
    d.title = pick(kSubjects) + " and " + pick(kObjects);
    if (i % 5 != 4) {
      auto month = static_cast<unsigned>(1 + (i * 7) % 12);
      auto year = 2020 + static_cast<int>(i % 2);
      d.publish_date = Date{std::chrono::year{year}, std::chrono::month{month},
                            std::chrono::day{static_cast<unsigned>(1 + i % 28)}};
    }
    auto passages = std::uniform_int_distribution<int>(2, 4)(rng);
    for (int p = 0; p < passages; ++p) {
      std::string text;
      auto sentences = std::uniform_int_distribution<int>(1, 9)(rng);
      for (int s = 0; s < sentences; ++s) {
        if (!text.empty()) text += ' ';
        text += pick(kSubjects) + " " + pick(kVerbs) + " " + pick(kObjects) + ".";
      }
      if (p == 0) text += " See https://example.org/study and [3].";
      d.passages.push_back(text);
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<QuestionRecord> random_records(std::size_t n, std::mt19937_64& rng,
                                           std::size_t questions, std::size_t docs) {
  std::uniform_int_distribution<std::size_t> q(0, questions - 1);
  std::uniform_int_distribution<std::size_t> d(0, docs - 1);
  std::vector<QuestionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    QuestionRecord r;
    r.question = "what is topic " + std::to_string(q(rng));
    r.doc_id = "d" + std::to_string(d(rng));
    r.span_index = i;
    r.backend_id = "mock";
    out.push_back(std::move(r));
  }
  return out;
}

FakeService::FakeService() : server_(std::make_unique<httplib::Server>()) {}

FakeService::~FakeService() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

void FakeService::route(const std::string& path, Handler handler) {
  server_->Post(path, [handler](const httplib::Request& req, httplib::Response& res) {
    auto [status, body] = handler(req.body);
    res.status = status;
    res.set_content(body, "application/json");
  });
}

void FakeService::start() {
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("cannot bind fake service");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

std::string FakeService::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

}  // namespace qscope::testing
