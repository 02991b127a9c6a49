#include "qscope/preprocess.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

using nlohmann::json;

void WindowConfig::validate() const {
  if (window_size < 1) throw InvalidArgument("window size must be >= 1");
  if (stride < 1 || stride > window_size) {
    throw InvalidArgument("stride must satisfy 1 <= stride <= window size");
  }
}

namespace {

// A match may not end in trailing punctuation: "(doi:10.1/x)." keeps ")."
#define QSCOPE_TAIL R"(\S*[^\s.,;:!?)\]}'"])"

const std::regex& email_re() {
  static const std::regex re(R"(\S+@\S+\.)" QSCOPE_TAIL);
  return re;
}
const std::regex& url_re() {
  static const std::regex re(R"(https?://)" QSCOPE_TAIL R"(|www\.)" QSCOPE_TAIL);
  return re;
}
const std::regex& doi_re() {
  static const std::regex re(R"((doi:\s*)?10\.\d{4,9}/)" QSCOPE_TAIL);
  return re;
}
const std::regex& citation_re() {
  static const std::regex re(R"(\[\d+(\s*,\s*\d+)*\])");
  return re;
}
const std::regex& section_re() {
  static const std::regex re(R"(^\d+(\.\d+)*\s+)");
  return re;
}

#undef QSCOPE_TAIL

std::string clean_once(std::string_view raw) {
  std::string text;
  text.reserve(raw.size());
  // Section numbers are anchored per line, so strip them before newlines go.
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto nl = raw.find('\n', start);
    auto line = raw.substr(start, nl == std::string_view::npos ? raw.npos : nl - start);
    if (!line.empty() && line[0] >= '0' && line[0] <= '9') {
      text += std::regex_replace(std::string(line), section_re(), "",
                                 std::regex_constants::format_first_only);
    } else {
      text += line;
    }
    if (nl == std::string_view::npos) break;
    text.push_back('\n');
    start = nl + 1;
  }
  // Each rule runs only when its literal anchor occurs; std::regex is slow.
  auto has = [&text](std::string_view s) { return text.find(s) != std::string::npos; };
  if (has("@")) text = std::regex_replace(text, email_re(), "");
  if (has("http") || has("www.")) text = std::regex_replace(text, url_re(), "");
  if (has("10.")) text = std::regex_replace(text, doi_re(), "");
  if (has("[")) text = std::regex_replace(text, citation_re(), "");
  return collapse_whitespace(text);
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
inline bool is_upper_or_digit(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }
inline bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }
inline bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '[' || c == '{'; }

constexpr std::array kAbbreviations = std::to_array<std::string_view>({
    "al.",    "approx.", "ca.",   "cf.",   "ch.",   "dr.",    "e.g.",   "eq.",  "eqs.",
    "fig.",   "figs.",   "i.e.",  "jr.",   "mr.",   "mrs.",   "ms.",    "no.",  "nos.",
    "pp.",    "prof.",   "ref.",  "refs.", "resp.", "sec.",   "sr.",    "st.",  "suppl.",
    "tab.",   "viz.",    "vol.",  "vs.",
});

// Token ending at the '.' at `dot`, lowercased, leading brackets dropped.
std::string token_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  while (b < dot && (text[b] == '(' || text[b] == '[' || text[b] == '"' || text[b] == '\'')) ++b;
  return ascii_lower(text.substr(b, dot - b + 1));
}

bool blocks_split(std::string_view text, std::size_t dot) {
  std::string token = token_before(text, dot);
  if (token.size() == 2 && is_alpha(token[0])) return true;  // single letter
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end();
}

}  // namespace

std::string clean_text(std::string_view raw) {
  std::string current = clean_once(raw);
  while (true) {
    std::string again = clean_once(current);
    if (again == current) return current;
    current = std::move(again);
  }
}

std::vector<std::string> RuleSentenceSplitter::split(std::string_view text) const {
  std::vector<std::string> out;
  auto emit = [&out](std::string_view piece) {
    auto t = trim(piece);
    if (!t.empty()) out.emplace_back(t);
  };
  const std::size_t n = text.size();
  std::size_t sentence_start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t end = i + 1;
    while (end < n && is_closer(text[end])) ++end;
    if (end >= n || !is_space(text[end])) continue;
    std::size_t next = end;
    while (next < n && is_space(text[next])) ++next;
    // The next sentence may open with quotes or brackets.
    std::size_t first = next;
    while (first < n && is_opener(text[first])) ++first;
    if (first >= n || !is_upper_or_digit(text[first])) continue;
    if (c == '.' && blocks_split(text, i)) continue;
    emit(text.substr(sentence_start, end - sentence_start));
    sentence_start = next;
    i = next - 1;
  }
  if (sentence_start < n) emit(text.substr(sentence_start));
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  return RuleSentenceSplitter{}.split(text);
}

std::vector<std::pair<std::size_t, std::size_t>> window_ranges(std::size_t n,
                                                               const WindowConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n == 0 || n < cfg.min_sentences_per_passage) return out;
  // Windows needed so that the last one reaches n.
  std::size_t count = 1;
  if (n > cfg.window_size) count += (n - cfg.window_size + cfg.stride - 1) / cfg.stride;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    std::size_t start = w * cfg.stride;
    out.emplace_back(start, std::min(start + cfg.window_size, n));
  }
  return out;
}

std::vector<SentenceSpan> window_spans(const std::vector<std::string>& sentences,
                                       const WindowConfig& cfg, const std::string& doc_id) {
  std::vector<SentenceSpan> spans;
  for (auto [start, end] : window_ranges(sentences.size(), cfg)) {
    SentenceSpan span;
    span.doc_id = doc_id;
    span.span_index = spans.size();
    span.sentence_start = start;
    span.sentence_end = end;
    for (std::size_t s = start; s < end; ++s) {
      if (s > start) span.text.push_back(' ');
      span.text += sentences[s];
    }
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<SentenceSpan> document_spans(const Document& doc, const WindowConfig& cfg,
                                         const SentenceSplitter& splitter) {
  std::vector<std::string> sentences;
  for (const auto& passage : doc.passages) {
    auto parts = splitter.split(clean_text(passage));
    if (parts.size() < cfg.min_sentences_per_passage) continue;
    std::move(parts.begin(), parts.end(), std::back_inserter(sentences));
  }
  return window_spans(sentences, cfg, doc.doc_id);
}

std::string to_json_line(const SentenceSpan& span) {
  json j;
  j["doc_id"] = span.doc_id;
  j["span_index"] = span.span_index;
  j["sentence_start"] = span.sentence_start;
  j["sentence_end"] = span.sentence_end;
  j["text"] = span.text;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

SentenceSpan span_from_json_line(std::string_view line) {
  try {
    json j = json::parse(line);
    SentenceSpan span;
    span.doc_id = j.at("doc_id").get<std::string>();
    span.span_index = j.at("span_index").get<std::size_t>();
    span.sentence_start = j.at("sentence_start").get<std::size_t>();
    span.sentence_end = j.at("sentence_end").get<std::size_t>();
    span.text = j.at("text").get<std::string>();
    if (span.doc_id.empty() || span.text.empty() || span.sentence_start >= span.sentence_end) {
      throw ParseError("span violates its invariants");
    }
    return span;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad span record: ") + e.what());
  }
}

void write_spans(const std::string& path, const std::vector<SentenceSpan>& spans) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write span file: " + path);
  for (const auto& s : spans) out << to_json_line(s) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<SentenceSpan> read_spans(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open span file: " + path);
  std::vector<SentenceSpan> spans;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      spans.push_back(span_from_json_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return spans;
}

}  // namespace qscope
