#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qscope {

inline constexpr std::string_view kToolVersion = "0.3.0";

struct StageRecord {
  std::string stage;
  std::string status;  // completed | resumed | failed
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::size_t>> counts;
  std::string error;

  std::optional<std::size_t> count(std::string_view name) const;
};

/// Record of one pipeline run: the full input configuration plus one entry
/// per executed stage, appended in execution order.
class RunManifest {
 public:
  RunManifest() = default;
  RunManifest(std::string config_json, std::uint64_t seed);

  void append(StageRecord record) { stages_.push_back(std::move(record)); }

  const std::string& tool_version() const { return tool_version_; }
  const std::string& config_json() const { return config_json_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<StageRecord>& stages() const { return stages_; }

  /// Latest non-failed record for `stage`.
  const StageRecord* find(std::string_view stage) const;
  /// Latest value of a named count across stages.
  std::optional<std::size_t> count(std::string_view name) const;

  /// Checks unique <= post-filter <= generations <= spans * questions_per_span
  /// for whichever counts are present. Returns the violated relations.
  std::vector<std::string> count_violations(std::size_t questions_per_span) const;

  std::string to_json() const;
  static RunManifest from_json(std::string_view text);

  /// Written to `path.tmp` then renamed over `path`.
  void save(const std::string& path) const;
  static RunManifest load(const std::string& path);

  /// Human-readable summary for `manifest show`.
  std::string render() const;

 private:
  std::string tool_version_{kToolVersion};
  std::string config_json_ = "{}";
  std::uint64_t seed_ = 0;
  std::vector<StageRecord> stages_;
};

}  // namespace qscope
