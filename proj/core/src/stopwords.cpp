#include "qscope/stopwords.hpp"

#include <array>
#include <fstream>

#include "qscope/embedding.hpp"
#include "qscope/error.hpp"
#include "qscope/text.hpp"

namespace qscope {

namespace {

// Sorted. A copy lives in data/stopwords_en.txt; tests pin both to the same
// checksum.
constexpr std::array kEnglishStopwords = std::to_array<std::string_view>({
    "a", "about", "above", "after", "again", "against", "ain", "al", "all", "also", "am", "an",
    "and", "any", "are", "aren", "as", "at", "be", "because", "been", "before", "being",
    "below", "between", "both", "but", "by", "can", "couldn", "d", "did", "didn", "do", "does",
    "doesn", "doing", "don", "down", "during", "each", "et", "few", "for", "from", "further",
    "had", "hadn", "has", "hasn", "have", "haven", "having", "he", "her", "here", "hers",
    "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "isn", "it",
    "its", "itself", "just", "ll", "m", "ma", "me", "mightn", "more", "most", "mustn", "my",
    "myself", "needn", "no", "nor", "not", "now", "o", "of", "off", "on", "once", "only", "or",
    "other", "our", "ours", "ourselves", "out", "over", "own", "re", "s", "same", "shan", "she",
    "should", "shouldn", "so", "some", "such", "t", "than", "that", "the", "their", "theirs",
    "them", "themselves", "then", "there", "these", "they", "this", "those", "through", "to",
    "too", "under", "until", "up", "ve", "very", "was", "wasn", "we", "were", "weren", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with", "won", "wouldn",
    "y", "you", "your", "yours", "yourself", "yourselves",
});

}  // namespace

std::span<const std::string_view> english_stopword_list() { return kEnglishStopwords; }

std::uint64_t english_stopword_checksum() {
  std::string joined;
  for (std::size_t i = 0; i < kEnglishStopwords.size(); ++i) {
    if (i) joined.push_back('\n');
    joined.append(kEnglishStopwords[i]);
  }
  return fnv1a64(joined);
}

const StopwordSet& english_stopwords() {
  static const StopwordSet set = [] {
    StopwordSet s;
    for (auto w : kEnglishStopwords) s.emplace(w);
    return s;
  }();
  return set;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file: " + path);
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    auto word = trim(line);
    if (word.empty() || word.front() == '#') continue;
    out.insert(ascii_lower(word));
  }
  return out;
}

}  // namespace qscope
