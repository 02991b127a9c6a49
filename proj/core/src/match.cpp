#include "qscope/match.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "qscope/csv.hpp"
#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

using nlohmann::json;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Mean over rows of `from` of the best cosine against any row of `to`.
double greedy_mean(const TokenEmbeddingSeq& from, const TokenEmbeddingSeq& to) {
  double total = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < to.size(); ++j) best = std::max(best, dot(from.vector(i), to.vector(j)));
    total += best;
  }
  return total / static_cast<double>(from.size());
}

}  // namespace

MatchScores bertscore(const TokenEmbeddingSeq& reference, const TokenEmbeddingSeq& candidate) {
  if (reference.dim() != candidate.dim()) {
    throw InvalidArgument("bertscore: embedding dimensions differ (" +
                          std::to_string(reference.dim()) + " vs " +
                          std::to_string(candidate.dim()) + ")");
  }
  MatchScores s;
  s.recall = greedy_mean(reference, candidate);
  s.precision = greedy_mean(candidate, reference);
  double sum = s.precision + s.recall;
  s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

std::vector<MatchCandidate> rank_candidates(const std::string& reference,
                                            const std::vector<std::string>& candidates,
                                            EmbeddingBackend& embedder, std::size_t k) {
  if (k == 0) throw InvalidArgument("rank_candidates: k must be >= 1");
  if (candidates.empty()) throw InvalidArgument("rank_candidates: no candidates");

  // Embed each distinct text once; reference first.
  std::vector<std::string> texts{reference};
  std::map<std::string, std::size_t> slot{{reference, 0}};
  for (const auto& c : candidates) {
    if (slot.emplace(c, texts.size()).second) texts.push_back(c);
  }
  auto embedded = embedder.embed(texts);
  if (embedded.size() != texts.size()) {
    throw BackendError("embedder returned " + std::to_string(embedded.size()) + " results for " +
                       std::to_string(texts.size()) + " texts");
  }

  std::vector<MatchCandidate> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    auto s = bertscore(embedded[0], embedded[slot.at(c)]);
    scored.push_back({reference, c, s.precision, s.recall, s.f1});
  }
  std::sort(scored.begin(), scored.end(), [](const MatchCandidate& a, const MatchCandidate& b) {
    if (a.f1 != b.f1) return a.f1 > b.f1;
    return a.candidate < b.candidate;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::string_view to_string(MatchLabel label) {
  switch (label) {
    case MatchLabel::Strong: return "strong";
    case MatchLabel::Weak: return "weak";
    case MatchLabel::None: return "none";
    case MatchLabel::Unset: break;
  }
  return "unset";
}

MatchLabel parse_match_label(std::string_view text) {
  auto t = ascii_lower(trim(text));
  if (t.empty() || t == "unset") return MatchLabel::Unset;
  if (t == "strong") return MatchLabel::Strong;
  if (t == "weak") return MatchLabel::Weak;
  if (t == "none" || t == "no") return MatchLabel::None;
  throw ParseError("unknown annotation label '" + std::string(text) + "'");
}

namespace {

const std::vector<std::string>& sheet_header() {
  static const std::vector<std::string> header{"reference", "context", "cand1", "f1_1", "cand2",
                                               "f1_2",      "cand3",   "f1_3",  "label"};
  return header;
}

constexpr std::string_view kSheetPreamble =
    "# Label each row with the best match among its candidates:\n"
    "#   strong - a candidate asks semantically the same question as the reference\n"
    "#   weak   - a candidate is broader, but its answer contains the reference's answer\n"
    "#   none   - no candidate matches\n"
    "# Leave the label empty (or 'unset') until the row is judged.\n";

std::string format_f1(double f1) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", f1);
  return buf;
}

std::vector<std::string> sheet_fields(const SheetRow& row) {
  std::vector<std::string> fields{row.reference, row.context};
  for (std::size_t i = 0; i < 3; ++i) {
    if (i < row.candidates.size()) {
      fields.push_back(row.candidates[i].text);
      fields.push_back(format_f1(row.candidates[i].f1));
    } else {
      fields.emplace_back();
      fields.emplace_back();
    }
  }
  fields.emplace_back(row.label == MatchLabel::Unset ? "" : std::string(to_string(row.label)));
  return fields;
}

void write_sheet_header(std::ostream& out) {
  out << kSheetPreamble;
  csv::write_row(out, sheet_header());
}

}  // namespace

void write_sheet(const std::string& path, const AnnotationSheet& sheet) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write annotation sheet: " + path);
  write_sheet_header(out);
  for (const auto& row : sheet.rows) csv::write_row(out, sheet_fields(row));
  if (!out) throw IoError("write failed: " + path);
}

AnnotationSheet read_sheet(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotation sheet: " + path);
  // Skip the '#' preamble.
  while (in.peek() == '#') {
    std::string skip;
    std::getline(in, skip);
  }
  std::vector<std::string> fields;
  if (!csv::read_row(in, fields) || fields != sheet_header()) {
    throw ParseError(path + ": expected header " + join(sheet_header(), ","));
  }
  AnnotationSheet sheet;
  std::size_t line = 1;
  while (csv::read_row(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;
    auto where = path + ":" + std::to_string(line);
    if (fields.size() != 9) throw ParseError(where + ": expected 9 fields");
    SheetRow row;
    row.reference = fields[0];
    row.context = fields[1];
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& text = fields[2 + 2 * i];
      if (text.empty()) continue;
      try {
        row.candidates.push_back({text, std::stod(fields[3 + 2 * i])});
      } catch (const std::logic_error&) {
        throw ParseError(where + ": bad f1 value '" + fields[3 + 2 * i] + "'");
      }
    }
    try {
      row.label = parse_match_label(fields[8]);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    sheet.rows.push_back(std::move(row));
  }
  return sheet;
}

std::vector<GoldPair> read_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gold file: " + path);
  std::vector<GoldPair> gold;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      GoldPair g;
      g.reference = j.at("question").get<std::string>();
      if (auto d = j.find("doc_id"); d != j.end() && !d->is_null()) g.doc_id = d->get<std::string>();
      if (trim(g.reference).empty()) throw ParseError("empty question");
      gold.push_back(std::move(g));
    } catch (const std::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": bad gold record: " + e.what());
    }
  }
  return gold;
}

namespace {

/// Appends finished rows to a checkpoint sheet and serves rows from a
/// previous, interrupted run.
class SheetCheckpoint {
 public:
  explicit SheetCheckpoint(const std::optional<std::string>& path) : path_(path) {
    if (!path_ || !std::filesystem::exists(*path_)) return;
    for (auto& row : read_sheet(*path_).rows) {
      done_.emplace(std::make_pair(row.reference, row.context), std::move(row));
    }
  }

  const SheetRow* find(const std::string& reference, const std::string& context) const {
    auto it = done_.find({reference, context});
    return it == done_.end() ? nullptr : &it->second;
  }

  void record(const SheetRow& row) {
    if (!path_) return;
    bool fresh = !std::filesystem::exists(*path_);
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to checkpoint: " + *path_);
    if (fresh) write_sheet_header(out);
    csv::write_row(out, sheet_fields(row));
  }

  std::string describe() const { return path_ ? *path_ : std::string("(no checkpoint)"); }

 private:
  std::optional<std::string> path_;
  std::map<std::pair<std::string, std::string>, SheetRow> done_;
};

SheetRow make_row(const std::string& reference, const std::string& context,
                  const std::vector<std::string>& candidates, EmbeddingBackend& embedder,
                  std::size_t k) {
  SheetRow row{reference, context, {}, MatchLabel::Unset};
  for (auto& m : rank_candidates(reference, candidates, embedder, k)) {
    row.candidates.push_back({std::move(m.candidate), m.f1});
  }
  return row;
}

template <typename Job>
ExperimentResult run_rows(const std::vector<Job>& jobs, EmbeddingBackend& embedder,
                          const ExperimentOptions& options) {
  SheetCheckpoint checkpoint(options.checkpoint_path);
  ExperimentResult result;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& job = jobs[i];
    if (const auto* row = checkpoint.find(job.reference, job.context)) {
      result.sheet.rows.push_back(*row);
      continue;
    }
    try {
      auto row = make_row(job.reference, job.context, *job.candidates, embedder, options.k);
      checkpoint.record(row);
      result.sheet.rows.push_back(std::move(row));
    } catch (const BackendUnavailable& e) {
      throw BackendUnavailable(std::string(e.what()) + " (stopped at row " + std::to_string(i + 1) +
                               " of " + std::to_string(jobs.size()) +
                               "; finished rows kept in " + checkpoint.describe() + ")");
    } catch (const BackendError& e) {
      throw BackendError(std::string(e.what()) + " (stopped at row " + std::to_string(i + 1) +
                         " of " + std::to_string(jobs.size()) + "; finished rows kept in " +
                         checkpoint.describe() + ")");
    }
  }
  return result;
}

struct RowJob {
  std::string reference;
  std::string context;
  const std::vector<std::string>* candidates;
};

}  // namespace

ExperimentResult per_document_experiment(const std::vector<GoldPair>& gold,
                                         const std::vector<QuestionRecord>& questions,
                                         EmbeddingBackend& embedder,
                                         const ExperimentOptions& options) {
  std::map<std::string, std::set<std::string>> by_doc;
  for (const auto& q : questions) {
    if (!trim(q.question).empty()) by_doc[q.doc_id].insert(q.question);
  }
  std::map<std::string, std::vector<std::string>> candidates;
  for (auto& [doc, set] : by_doc) candidates[doc].assign(set.begin(), set.end());

  std::vector<RowJob> jobs;
  std::vector<ExcludedRow> excluded;
  for (const auto& g : gold) {
    auto it = candidates.find(g.doc_id);
    if (g.doc_id.empty()) {
      excluded.push_back({g.reference, g.doc_id, "gold record has no doc_id"});
    } else if (it == candidates.end()) {
      excluded.push_back({g.reference, g.doc_id, "no generated questions for document"});
    } else {
      jobs.push_back({g.reference, g.doc_id, &it->second});
    }
  }
  auto result = run_rows(jobs, embedder, options);
  result.excluded = std::move(excluded);
  return result;
}

ExperimentResult frequent_question_experiment(const std::vector<std::string>& gold,
                                              const std::vector<FrequencyEntry>& frequent,
                                              EmbeddingBackend& embedder,
                                              const ExperimentOptions& options) {
  if (frequent.empty()) throw InvalidArgument("frequent question list is empty");
  std::vector<std::string> candidates;
  candidates.reserve(frequent.size());
  for (const auto& e : frequent) candidates.push_back(e.question);
  std::vector<RowJob> jobs;
  for (const auto& ref : gold) jobs.push_back({ref, std::string(kCorpusContext), &candidates});
  return run_rows(jobs, embedder, options);
}

std::size_t Fraction::percent() const {
  if (denominator == 0) return 0;
  return (200 * numerator + denominator) / (2 * denominator);
}

std::string AnnotationSummary::display() const {
  auto part = [](const char* name, const Fraction& f) {
    return std::string(name) + " " + std::to_string(f.numerator) + " (" +
           std::to_string(f.percent()) + "%)";
  };
  return "total " + std::to_string(total) + ", " + part("match", match_share()) + ", " +
         part("strong", strong_share()) + ", " + part("weak", weak_share()) + ", " +
         part("none", none_share());
}

std::string AnnotationSummary::to_json() const {
  auto frac = [](const Fraction& f) {
    return json{{"count", f.numerator},
                {"of", f.denominator},
                {"fraction", f.value()},
                {"percent", f.percent()}};
  };
  json j{{"total", total},
         {"match", frac(match_share())},
         {"strong", frac(strong_share())},
         {"weak", frac(weak_share())},
         {"none", frac(none_share())}};
  return j.dump(2);
}

AnnotationSummary summarize_annotations(const AnnotationSheet& sheet) {
  AnnotationSummary s;
  std::vector<std::string> unset;
  for (std::size_t i = 0; i < sheet.rows.size(); ++i) {
    switch (sheet.rows[i].label) {
      case MatchLabel::Strong: ++s.strong; break;
      case MatchLabel::Weak: ++s.weak; break;
      case MatchLabel::None: ++s.none; break;
      case MatchLabel::Unset: unset.push_back(std::to_string(i + 1)); break;
    }
  }
  if (!unset.empty()) {
    throw InvalidArgument("annotation sheet has unlabelled rows: " + join(unset, ", "));
  }
  s.total = sheet.rows.size();
  s.match = s.strong + s.weak;
  return s;
}

}  // namespace qscope
