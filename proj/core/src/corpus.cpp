#include "qscope/corpus.hpp"

#include <algorithm>

#include <json.hpp>

#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

using nlohmann::json;

MatchMode parse_match_mode(std::string_view text) {
  if (text == "any" || text == "any-of") return MatchMode::AnyOf;
  if (text == "all" || text == "all-of") return MatchMode::AllOf;
  throw InvalidArgument("match mode must be 'any' or 'all', got '" + std::string(text) + "'");
}

CorpusFormat parse_corpus_format(std::string_view id) {
  if (id == "jsonl") return CorpusFormat::JsonLines;
  throw InvalidArgument("unknown corpus format '" + std::string(id) + "' (supported: jsonl)");
}

void CorpusFilter::validate() const {
  for (const auto& term : keyword_terms) {
    if (term.empty()) throw InvalidArgument("corpus filter: empty keyword term");
  }
}

bool CorpusFilter::keeps(const Document& doc) const {
  if (min_date) {
    if (!doc.publish_date || !(*doc.publish_date > *min_date)) return false;
  }
  auto mentions = [&doc](const std::string& term) {
    if (contains_icase(doc.title, term)) return true;
    return std::any_of(doc.passages.begin(), doc.passages.end(),
                       [&term](const std::string& p) { return contains_icase(p, term); });
  };
  if (match_mode == MatchMode::AnyOf) {
    return std::any_of(keyword_terms.begin(), keyword_terms.end(), mentions);
  }
  return std::all_of(keyword_terms.begin(), keyword_terms.end(), mentions);
}

namespace {

Document document_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  Document doc;
  auto id = j.find("doc_id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw ParseError("missing or empty doc_id");
  }
  doc.doc_id = id->get<std::string>();

  if (auto t = j.find("title"); t != j.end() && !t->is_null()) {
    if (!t->is_string()) throw ParseError("title must be a string");
    doc.title = t->get<std::string>();
  }
  if (auto d = j.find("publish_date"); d != j.end() && !d->is_null()) {
    if (!d->is_string()) throw ParseError("publish_date must be a string or null");
    doc.publish_date = parse_date(d->get<std::string>());
  }
  auto p = j.find("passages");
  if (p == j.end() || !p->is_array()) throw ParseError("passages must be an array");
  for (const auto& passage : *p) {
    if (!passage.is_string()) throw ParseError("passages must contain only strings");
    doc.passages.push_back(passage.get<std::string>());
  }
  return doc;
}

}  // namespace

CorpusReader::CorpusReader(const std::string& path, bool strict, CorpusFormat)
    : path_(path), in_(path), strict_(strict) {
  if (!in_) throw IoError("cannot open corpus file: " + path);
}

std::optional<Document> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (trim(line).empty()) continue;
    try {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
      }
      Document doc = document_from_json(j);
      auto pos = std::lower_bound(seen_ids_.begin(), seen_ids_.end(), doc.doc_id);
      if (pos != seen_ids_.end() && *pos == doc.doc_id) {
        throw ParseError("duplicate doc_id '" + doc.doc_id + "'");
      }
      seen_ids_.insert(pos, doc.doc_id);
      return doc;
    } catch (const ParseError& e) {
      if (strict_) {
        throw ParseError(path_ + ":" + std::to_string(line_no_) + ": " + e.what());
      }
      diagnostics_.push_back({line_no_, e.what()});
    }
  }
  if (in_.bad()) throw IoError("read error on corpus file: " + path_);
  return std::nullopt;
}

LoadResult load_corpus(const std::string& path, bool strict, CorpusFormat format) {
  CorpusReader reader(path, strict, format);
  LoadResult result;
  while (auto doc = reader.next()) result.documents.push_back(std::move(*doc));
  result.diagnostics = reader.diagnostics();
  return result;
}

std::vector<Document> filter_corpus(const std::vector<Document>& docs, const CorpusFilter& filter) {
  std::vector<Document> out;
  std::copy_if(docs.begin(), docs.end(), std::back_inserter(out),
               [&filter](const Document& d) { return filter.keeps(d); });
  return out;
}

std::string to_json_line(const Document& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["title"] = doc.title;
  j["publish_date"] = doc.publish_date ? json(format_date(*doc.publish_date)) : json(nullptr);
  j["passages"] = doc.passages;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write corpus file: " + path);
  for (const auto& d : docs) out << to_json_line(d) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace qscope
