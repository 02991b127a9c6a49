#include "support/oracles.hpp"

#include <cmath>

namespace qscope::oracle {

std::vector<std::pair<std::size_t, std::size_t>> windows(std::size_t n, std::size_t window,
                                                         std::size_t stride,
                                                         std::size_t min_sentences) {
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  if (n < min_sentences) return kept;
  for (std::size_t start = 0; start < n; start += stride) {
    std::size_t end = start + window < n ? start + window : n;
    if (!kept.empty() && kept.back().first <= start && end <= kept.back().second) continue;
    kept.emplace_back(start, end);
  }
  return kept;
}

std::vector<FrequencyEntry> naive_frequencies(const std::vector<QuestionRecord>& records) {
  std::vector<FrequencyEntry> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j) seen = seen || records[j].question == records[i].question;
    if (seen) continue;
    FrequencyEntry e{records[i].question, 0, 0};
    std::vector<std::string> docs;
    for (const auto& r : records) {
      if (r.question != e.question) continue;
      ++e.span_count;
      bool known = false;
      for (const auto& d : docs) known = known || d == r.doc_id;
      if (!known) docs.push_back(r.doc_id);
    }
    e.doc_count = docs.size();
    out.push_back(e);
  }
  // Selection sort: span_count desc, question asc.
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      const auto& a = out[j];
      const auto& b = out[best];
      if (a.span_count > b.span_count || (a.span_count == b.span_count && a.question < b.question)) {
        best = j;
      }
    }
    std::swap(out[i], out[best]);
  }
  return out;
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace

Scores brute_bertscore(const std::vector<std::vector<double>>& ref,
                       const std::vector<std::vector<double>>& cand) {
  double r = 0, p = 0;
  for (const auto& x : ref) {
    double best = -2;
    for (const auto& y : cand) best = std::fmax(best, cosine(x, y));
    r += best;
  }
  for (const auto& y : cand) {
    double best = -2;
    for (const auto& x : ref) best = std::fmax(best, cosine(x, y));
    p += best;
  }
  r /= static_cast<double>(ref.size());
  p /= static_cast<double>(cand.size());
  return {p, r, (p + r) > 0 ? 2 * p * r / (p + r) : 0.0};
}

}  // namespace qscope::oracle
