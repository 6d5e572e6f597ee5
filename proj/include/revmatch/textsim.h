// Copyright 2026 The revmatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVMATCH_TEXTSIM_H_
#define REVMATCH_TEXTSIM_H_

// Paper-paper similarity from abstracts: term-frequency vectors compared
// by cosine, raised to a configurable power (squared by default).

#include <algorithm>
#include <iterator>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "revmatch/csv.h"
#include "revmatch/dataset.h"

namespace revmatch {

using TermVector = std::map<std::string, double>;

namespace internal {

inline constexpr std::string_view kStopwords[] = {
    "a",       "about",  "above",   "after",   "again",   "against", "all",
    "am",      "an",     "and",     "any",     "are",     "as",      "at",
    "be",      "because", "been",   "before",  "being",   "below",   "between",
    "both",    "but",    "by",      "can",     "could",   "did",     "do",
    "does",    "doing",  "down",    "during",  "each",    "few",     "for",
    "from",    "further", "had",    "has",     "have",    "having",  "he",
    "her",     "here",   "hers",    "herself", "him",     "himself", "his",
    "how",     "i",      "if",      "in",      "into",    "is",      "it",
    "its",     "itself", "just",    "may",     "me",      "more",    "most",
    "my",      "myself", "no",      "nor",     "not",     "now",     "of",
    "off",     "on",     "once",    "only",    "or",      "other",   "our",
    "ours",    "ourselves", "out",  "over",    "own",     "same",    "she",
    "should",  "so",     "some",    "such",    "than",    "that",    "the",
    "their",   "theirs", "them",    "themselves", "then", "there",   "these",
    "they",    "this",   "those",   "through", "to",      "too",     "under",
    "until",   "up",     "very",    "was",     "we",      "were",    "what",
    "when",    "where",  "which",   "while",   "who",     "whom",    "why",
    "will",    "with",   "would",   "you",     "your",    "yours",   "also",
    "paper",
};

inline bool IsStopword(std::string_view term) {
  static const auto* sorted = [] {
    auto* words = new std::vector<std::string_view>(std::begin(kStopwords),
                                                    std::end(kStopwords));
    std::sort(words->begin(), words->end());
    return words;
  }();
  return std::binary_search(sorted->begin(), sorted->end(), term);
}

}  // namespace internal

// Lowercases, treats ASCII punctuation as whitespace, drops terms shorter
// than two bytes and stopwords, and counts the rest. Non-ASCII bytes are
// kept as part of terms.
inline TermVector Vectorize(std::string_view text) {
  TermVector vec;
  std::string term;
  auto flush = [&] {
    if (term.size() >= 2 && !internal::IsStopword(term)) vec[term] += 1.0;
    term.clear();
  };
  for (char raw : text) {
    const auto ch = static_cast<unsigned char>(raw);
    if (ch >= 0x80 || std::isalnum(ch)) {
      term.push_back(static_cast<char>(std::tolower(ch)));
    } else {
      flush();
    }
  }
  flush();
  return vec;
}

inline double Norm(const TermVector& v) {
  double sum = 0.0;
  for (const auto& [term, weight] : v) sum += weight * weight;
  return std::sqrt(sum);
}

// Cosine of two non-negative vectors; 0 if either is empty.
inline double Cosine(const TermVector& a, const TermVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  const double denom = Norm(a) * Norm(b);
  if (denom <= 0.0) return 0.0;
  return std::clamp(dot / denom, 0.0, 1.0);
}

struct SimilarityConfig {
  double exponent = 2.0;
  bool idf = false;
  double threshold = 1e-6;  // smaller similarities are stored as 0
};

// Sparse symmetric n x n similarity matrix. Rows are sorted by paper id
// and include the diagonal for papers with a non-empty vector.
class PaperSimilarity {
 public:
  using Entry = std::pair<PaperId, double>;

  PaperSimilarity() = default;
  explicit PaperSimilarity(std::size_t papers) : rows_(papers) {}

  std::size_t size() const { return rows_.size(); }

  double operator()(PaperId i, PaperId j) const {
    const auto& row = rows_[i.index()];
    auto it = std::lower_bound(
        row.begin(), row.end(), j,
        [](const Entry& e, PaperId id) { return e.first < id; });
    return (it != row.end() && it->first == j) ? it->second : 0.0;
  }

  const std::vector<Entry>& Row(PaperId i) const { return rows_[i.index()]; }

  // Entries must be set in increasing column order per row.
  void Append(PaperId i, PaperId j, double value) {
    rows_[i.index()].emplace_back(j, value);
  }

  std::size_t nonzeros() const {
    std::size_t total = 0;
    for (const auto& row : rows_) total += row.size();
    return total;
  }

 private:
  std::vector<std::vector<Entry>> rows_;
};

inline PaperSimilarity PaperSimilarities(const Corpus& corpus,
                                         const SimilarityConfig& config = {}) {
  const std::size_t n = corpus.abstracts.size();
  std::vector<TermVector> vectors;
  vectors.reserve(n);
  for (const auto& text : corpus.abstracts) vectors.push_back(Vectorize(text));

  if (config.idf) {
    std::unordered_map<std::string, int> df;
    std::size_t docs = 0;
    for (const auto& v : vectors) {
      if (v.empty()) continue;
      ++docs;
      for (const auto& [term, w] : v) ++df[term];
    }
    for (auto& v : vectors) {
      for (auto it = v.begin(); it != v.end();) {
        const double idf = std::log(static_cast<double>(docs) / df[it->first]);
        it->second *= idf;
        it = it->second > 0.0 ? std::next(it) : v.erase(it);
      }
    }
  }

  // Inverted index over integer term ids.
  std::unordered_map<std::string, int> term_ids;
  std::vector<std::vector<std::pair<int, double>>> postings;
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = Norm(vectors[i]);
    for (const auto& [term, w] : vectors[i]) {
      auto [it, inserted] =
          term_ids.try_emplace(term, static_cast<int>(postings.size()));
      if (inserted) postings.emplace_back();
      postings[it->second].emplace_back(static_cast<int>(i), w);
    }
  }
  std::vector<std::vector<std::pair<int, double>>> doc_terms(n);
  for (std::size_t t = 0; t < postings.size(); ++t) {
    for (const auto& [doc, w] : postings[t]) {
      doc_terms[doc].emplace_back(static_cast<int>(t), w);
    }
  }

  PaperSimilarity sim(n);
  std::vector<std::vector<PaperSimilarity::Entry>> lower(n);  // (j < i) entries, by row i
  std::vector<double> dot(n, 0.0);
  std::vector<int> touched;
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] <= 0.0) continue;
    touched.clear();
    for (const auto& [t, wi] : doc_terms[i]) {
      for (const auto& [doc, w] : postings[t]) {
        if (doc <= static_cast<int>(i)) continue;
        if (dot[doc] == 0.0) touched.push_back(doc);
        dot[doc] += wi * w;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (const auto& entry : lower[i]) sim.Append(PaperId(static_cast<int>(i)),
                                                  entry.first, entry.second);
    sim.Append(PaperId(static_cast<int>(i)), PaperId(static_cast<int>(i)), 1.0);
    for (int j : touched) {
      const double cosine =
          std::clamp(dot[j] / (norms[i] * norms[j]), 0.0, 1.0);
      dot[j] = 0.0;
      const double value = std::pow(cosine, config.exponent);
      if (value < config.threshold) continue;
      sim.Append(PaperId(static_cast<int>(i)), PaperId(j), value);
      lower[j].emplace_back(PaperId(static_cast<int>(i)), value);
    }
  }
  return sim;
}

// Writes `paper_a,paper_b,sim` for every stored off-diagonal pair a < b.
inline void WriteSimilarities(const PaperSimilarity& sim,
                              const IdMap<PaperId>& papers,
                              const std::string& path) {
  auto out = OpenOutput(path);
  WriteCsvRow(out, {"paper_a", "paper_b", "sim"});
  for (std::size_t i = 0; i < sim.size(); ++i) {
    const PaperId a(static_cast<int>(i));
    for (const auto& [b, value] : sim.Row(a)) {
      if (b <= a) continue;
      WriteCsvRow(out, {papers.Name(a), papers.Name(b), FormatDouble(value)});
    }
  }
}

}  // namespace revmatch

#endif  // REVMATCH_TEXTSIM_H_
