#include "qscope/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qscope/error.hpp"

namespace qscope {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::optional<std::size_t> StageRecord::count(std::string_view name) const {
  for (const auto& [key, value] : counts) {
    if (key == name) return value;
  }
  return std::nullopt;
}

RunManifest::RunManifest(std::string config_json, std::uint64_t seed)
    : config_json_(std::move(config_json)), seed_(seed) {}

const StageRecord* RunManifest::find(std::string_view stage) const {
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    if (it->stage == stage && it->status != "failed") return &*it;
  }
  return nullptr;
}

std::optional<std::size_t> RunManifest::count(std::string_view name) const {
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    if (auto v = it->count(name)) return v;
  }
  return std::nullopt;
}

std::vector<std::string> RunManifest::count_violations(std::size_t questions_per_span) const {
  std::vector<std::string> out;
  auto spans = count("spans");
  auto generations = count("generations");
  auto post = count("post_filter_questions");
  auto unique = count("unique_questions");
  if (unique && post && *unique > *post) out.push_back("unique_questions > post_filter_questions");
  if (post && generations && *post > *generations) {
    out.push_back("post_filter_questions > generations");
  }
  if (generations && spans && *generations > *spans * questions_per_span) {
    out.push_back("generations > spans * questions_per_span");
  }
  return out;
}

std::string RunManifest::to_json() const {
  ordered_json j;
  j["tool_version"] = tool_version_;
  j["seed"] = seed_;
  j["config"] = ordered_json::parse(config_json_);
  j["stages"] = ordered_json::array();
  for (const auto& s : stages_) {
    ordered_json st;
    st["stage"] = s.stage;
    st["status"] = s.status;
    st["outputs"] = s.outputs;
    ordered_json counts = ordered_json::object();
    for (const auto& [k, v] : s.counts) counts[k] = v;
    st["counts"] = counts;
    if (!s.error.empty()) st["error"] = s.error;
    j["stages"].push_back(std::move(st));
  }
  return j.dump(2);
}

RunManifest RunManifest::from_json(std::string_view text) {
  RunManifest m;
  try {
    auto j = ordered_json::parse(text);
    m.tool_version_ = j.at("tool_version").get<std::string>();
    m.seed_ = j.value("seed", std::uint64_t{0});
    m.config_json_ = j.at("config").dump();
    for (const auto& st : j.at("stages")) {
      StageRecord s;
      s.stage = st.at("stage").get<std::string>();
      s.status = st.at("status").get<std::string>();
      s.outputs = st.value("outputs", std::vector<std::string>{});
      for (const auto& [k, v] : st.at("counts").items()) s.counts.emplace_back(k, v.get<std::size_t>());
      s.error = st.value("error", std::string{});
      m.stages_.push_back(std::move(s));
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return m;
}

void RunManifest::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + tmp);
    out << to_json() << '\n';
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string RunManifest::render() const {
  std::ostringstream out;
  out << "qscope " << tool_version_ << ", seed " << seed_ << '\n';
  for (const auto& s : stages_) {
    out << "  " << s.stage << " [" << s.status << "]";
    for (const auto& [k, v] : s.counts) out << ' ' << k << '=' << v;
    if (!s.error.empty()) out << "  error: " << s.error;
    out << '\n';
    for (const auto& o : s.outputs) out << "    -> " << o << '\n';
  }
  return out.str();
}

}  // namespace qscope
