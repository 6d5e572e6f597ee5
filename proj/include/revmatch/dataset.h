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

#ifndef REVMATCH_DATASET_H_
#define REVMATCH_DATASET_H_

// Reviewer/paper bidding data and its side information: subject
// categories, abstracts and co-authorship counts. Everything is indexed
// by dense 0-based ids with a bijective map back to the external string
// identifiers used in the files.
//
// On-disk layout of a data directory:
//   bids.csv                reviewer,paper,rating      (rating in 1..4)
//   paper_categories.csv    paper,primary,secondary
//   reviewer_categories.csv reviewer,category,relation (interest|conflict)
//   abstracts.tsv           paper<TAB>text             (\t \n \\ escaped)
//   coauthors.csv           reviewer_a,reviewer_b,count  (optional)

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "revmatch/csv.h"
#include "revmatch/error.h"
#include "revmatch/random.h"

namespace revmatch {

template <typename Tag>
struct DenseId {
  int value = 0;

  constexpr DenseId() = default;
  constexpr explicit DenseId(int v) : value(v) {}
  constexpr std::size_t index() const { return static_cast<std::size_t>(value); }
  constexpr auto operator<=>(const DenseId&) const = default;
};

using ReviewerId = DenseId<struct ReviewerTag>;
using PaperId = DenseId<struct PaperTag>;
using CategoryId = DenseId<struct CategoryTag>;

// Bijection between external string ids and dense indices, in order of
// first appearance.
template <typename Id>
class IdMap {
 public:
  Id Intern(const std::string& name) {
    auto [it, inserted] =
        index_.try_emplace(name, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(name);
    return Id(it->second);
  }

  std::optional<Id> Find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return Id(it->second);
  }

  const std::string& Name(Id id) const { return names_.at(id.index()); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

enum Rating : int { kNo = 1, kLow = 2, kOk = 3, kHigh = 4 };

struct Bid {
  ReviewerId reviewer;
  PaperId paper;
  int rating = 0;

  bool operator==(const Bid&) const = default;
};

using BidSet = std::vector<Bid>;

enum class Relation { kNone, kInterest, kConflict };

struct CategoryAnnotations {
  std::vector<CategoryId> primary;    // per paper
  std::vector<CategoryId> secondary;  // per paper
  std::vector<std::vector<CategoryId>> interest;  // per reviewer, sorted
  std::vector<std::vector<CategoryId>> conflict;  // per reviewer, sorted

  Relation RelationOf(ReviewerId u, CategoryId c) const {
    const auto& in = interest[u.index()];
    if (std::binary_search(in.begin(), in.end(), c)) return Relation::kInterest;
    const auto& co = conflict[u.index()];
    if (std::binary_search(co.begin(), co.end(), c)) return Relation::kConflict;
    return Relation::kNone;
  }
};

struct Corpus {
  std::vector<std::string> abstracts;  // per paper, possibly empty
};

// Symmetric sparse co-authorship counts with an empty diagonal.
class CoauthorCounts {
 public:
  CoauthorCounts() = default;
  explicit CoauthorCounts(std::size_t reviewers) : rows_(reviewers) {}

  void Resize(std::size_t reviewers) { rows_.resize(reviewers); }
  std::size_t reviewers() const { return rows_.size(); }

  // Returns false if the unordered pair was already present.
  bool Add(ReviewerId a, ReviewerId b, int count) {
    if (Count(a, b) != 0 || Contains(a, b)) return false;
    if (count == 0) {
      zero_pairs_.insert(Key(a, b));
      return true;
    }
    Insert(a, b, count);
    Insert(b, a, count);
    return true;
  }

  int Count(ReviewerId a, ReviewerId b) const {
    const auto& row = rows_[a.index()];
    auto it = std::lower_bound(
        row.begin(), row.end(), b,
        [](const auto& entry, ReviewerId id) { return entry.first < id; });
    return (it != row.end() && it->first == b) ? it->second : 0;
  }

  const std::vector<std::pair<ReviewerId, int>>& Row(ReviewerId u) const {
    return rows_[u.index()];
  }

  std::size_t pair_count() const {
    std::size_t total = 0;
    for (const auto& row : rows_) total += row.size();
    return total / 2;
  }

 private:
  static std::pair<int, int> Key(ReviewerId a, ReviewerId b) {
    return std::minmax(a.value, b.value);
  }
  bool Contains(ReviewerId a, ReviewerId b) const {
    return zero_pairs_.count(Key(a, b)) > 0;
  }
  void Insert(ReviewerId a, ReviewerId b, int count) {
    auto& row = rows_[a.index()];
    auto it = std::lower_bound(
        row.begin(), row.end(), b,
        [](const auto& entry, ReviewerId id) { return entry.first < id; });
    row.insert(it, {b, count});
  }

  std::vector<std::vector<std::pair<ReviewerId, int>>> rows_;
  std::set<std::pair<int, int>> zero_pairs_;
};

struct Dataset {
  IdMap<ReviewerId> reviewers;
  IdMap<PaperId> papers;
  IdMap<CategoryId> categories;
  BidSet bids;
  CategoryAnnotations annotations;
  Corpus corpus;
  CoauthorCounts coauthors;

  std::size_t num_reviewers() const { return reviewers.size(); }
  std::size_t num_papers() const { return papers.size(); }
  std::size_t num_categories() const { return categories.size(); }
};

struct DataPaths {
  std::string bids;
  std::string paper_categories;
  std::string reviewer_categories;
  std::string abstracts;
  std::string coauthors;  // optional; absent file means no co-authorship

  static DataPaths InDirectory(const std::filesystem::path& dir) {
    return DataPaths{(dir / "bids.csv").string(),
                     (dir / "paper_categories.csv").string(),
                     (dir / "reviewer_categories.csv").string(),
                     (dir / "abstracts.tsv").string(),
                     (dir / "coauthors.csv").string()};
  }
};

struct Split {
  BidSet train;
  BidSet test;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
};

namespace internal {

inline std::string UnescapeAbstract(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '\\' && k + 1 < text.size()) {
      switch (text[k + 1]) {
        case 't': out.push_back('\t'); ++k; continue;
        case 'n': out.push_back('\n'); ++k; continue;
        case 'r': out.push_back('\r'); ++k; continue;
        case '\\': out.push_back('\\'); ++k; continue;
        default: break;
      }
    }
    out.push_back(text[k]);
  }
  return out;
}

inline std::string EscapeAbstract(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

inline void RequireNonEmpty(const CsvReader& reader, const CsvRow& row,
                            std::size_t fields) {
  if (row.fields.size() != fields) {
    reader.Fail(row.line, "expected " + std::to_string(fields) +
                              " fields, got " +
                              std::to_string(row.fields.size()));
  }
  for (const auto& field : row.fields) {
    if (field.empty()) reader.Fail(row.line, "empty field");
  }
}

}  // namespace internal

// Checks the bid-set invariants: ratings in 1..4, one bid per pair.
inline void ValidateBids(const BidSet& bids, std::size_t reviewers,
                         std::size_t papers) {
  std::set<std::pair<int, int>> seen;
  for (const Bid& bid : bids) {
    if (bid.reviewer.index() >= reviewers || bid.paper.index() >= papers) {
      throw DataError("bid references an unknown reviewer or paper");
    }
    if (bid.rating < kNo || bid.rating > kHigh) {
      throw DataError("rating out of range: " + std::to_string(bid.rating));
    }
    if (!seen.emplace(bid.reviewer.value, bid.paper.value).second) {
      throw DataError("duplicate bid");
    }
  }
}

inline Dataset LoadDataset(const DataPaths& paths) {
  Dataset data;
  std::set<std::pair<int, int>> seen_bids;

  {
    auto in = OpenInput(paths.bids);
    CsvReader reader(in, paths.bids);
    reader.ExpectHeader({"reviewer", "paper", "rating"});
    CsvRow row;
    while (reader.Next(&row)) {
      internal::RequireNonEmpty(reader, row, 3);
      long long rating = 0;
      if (!ParseInt(row.fields[2], &rating)) {
        reader.Fail(row.line, "rating is not an integer: " + row.fields[2]);
      }
      if (rating < kNo || rating > kHigh) {
        reader.Fail(row.line, "rating out of range: " + row.fields[2]);
      }
      Bid bid{data.reviewers.Intern(row.fields[0]),
              data.papers.Intern(row.fields[1]), static_cast<int>(rating)};
      if (!seen_bids.emplace(bid.reviewer.value, bid.paper.value).second) {
        reader.Fail(row.line, "duplicate bid for reviewer '" + row.fields[0] +
                                  "' on paper '" + row.fields[1] + "'");
      }
      data.bids.push_back(bid);
    }
  }

  std::vector<std::optional<std::pair<CategoryId, CategoryId>>> paper_cats;
  {
    auto in = OpenInput(paths.paper_categories);
    CsvReader reader(in, paths.paper_categories);
    reader.ExpectHeader({"paper", "primary", "secondary"});
    CsvRow row;
    while (reader.Next(&row)) {
      internal::RequireNonEmpty(reader, row, 3);
      const PaperId paper = data.papers.Intern(row.fields[0]);
      const CategoryId primary = data.categories.Intern(row.fields[1]);
      const CategoryId secondary = data.categories.Intern(row.fields[2]);
      if (primary == secondary) {
        reader.Fail(row.line, "primary and secondary category coincide");
      }
      if (paper_cats.size() <= paper.index()) {
        paper_cats.resize(paper.index() + 1);
      }
      if (paper_cats[paper.index()]) {
        reader.Fail(row.line, "duplicate categories for paper '" +
                                  row.fields[0] + "'");
      }
      paper_cats[paper.index()] = std::make_pair(primary, secondary);
    }
  }

  std::vector<std::pair<ReviewerId, CategoryId>> interests, conflicts;
  {
    auto in = OpenInput(paths.reviewer_categories);
    CsvReader reader(in, paths.reviewer_categories);
    reader.ExpectHeader({"reviewer", "category", "relation"});
    CsvRow row;
    std::set<std::pair<int, int>> seen;
    while (reader.Next(&row)) {
      internal::RequireNonEmpty(reader, row, 3);
      const ReviewerId reviewer = data.reviewers.Intern(row.fields[0]);
      const CategoryId category = data.categories.Intern(row.fields[1]);
      if (!seen.emplace(reviewer.value, category.value).second) {
        reader.Fail(row.line, "reviewer '" + row.fields[0] +
                                  "' lists category '" + row.fields[1] +
                                  "' twice (interest and conflict must be "
                                  "disjoint)");
      }
      if (row.fields[2] == "interest") {
        interests.emplace_back(reviewer, category);
      } else if (row.fields[2] == "conflict") {
        conflicts.emplace_back(reviewer, category);
      } else {
        reader.Fail(row.line, "relation must be 'interest' or 'conflict'");
      }
    }
  }

  std::vector<std::optional<std::string>> abstracts;
  {
    auto in = OpenInput(paths.abstracts);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      auto fail = [&](const std::string& msg) {
        throw DataError(paths.abstracts + ":" + std::to_string(line_no) +
                        ": " + msg);
      };
      if (tab == std::string::npos) fail("expected paper<TAB>text");
      if (tab == 0) fail("empty paper id");
      const PaperId paper = data.papers.Intern(line.substr(0, tab));
      if (abstracts.size() <= paper.index()) {
        abstracts.resize(paper.index() + 1);
      }
      if (abstracts[paper.index()]) {
        fail("duplicate abstract for paper '" + line.substr(0, tab) + "'");
      }
      abstracts[paper.index()] =
          internal::UnescapeAbstract(std::string_view(line).substr(tab + 1));
    }
  }

  std::vector<std::tuple<ReviewerId, ReviewerId, int, int>> coauthor_rows;
  if (!paths.coauthors.empty() && std::filesystem::exists(paths.coauthors)) {
    auto in = OpenInput(paths.coauthors);
    CsvReader reader(in, paths.coauthors);
    reader.ExpectHeader({"reviewer_a", "reviewer_b", "count"});
    CsvRow row;
    while (reader.Next(&row)) {
      internal::RequireNonEmpty(reader, row, 3);
      long long count = 0;
      if (!ParseInt(row.fields[2], &count) || count < 0 ||
          count > std::numeric_limits<int>::max()) {
        reader.Fail(row.line, "count must be a non-negative integer");
      }
      if (row.fields[0] == row.fields[1]) {
        reader.Fail(row.line, "self co-authorship pair");
      }
      coauthor_rows.emplace_back(data.reviewers.Intern(row.fields[0]),
                                 data.reviewers.Intern(row.fields[1]),
                                 static_cast<int>(count), row.line);
    }
  }

  const std::size_t m = data.num_reviewers();
  const std::size_t n = data.num_papers();

  paper_cats.resize(n);
  data.annotations.primary.resize(n);
  data.annotations.secondary.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!paper_cats[i]) {
      throw DataError(paths.paper_categories + ": paper '" +
                      data.papers.Name(PaperId(static_cast<int>(i))) +
                      "' missing primary/secondary category");
    }
    data.annotations.primary[i] = paper_cats[i]->first;
    data.annotations.secondary[i] = paper_cats[i]->second;
  }
  data.annotations.interest.assign(m, {});
  data.annotations.conflict.assign(m, {});
  for (auto [u, c] : interests) data.annotations.interest[u.index()].push_back(c);
  for (auto [u, c] : conflicts) data.annotations.conflict[u.index()].push_back(c);
  for (auto& v : data.annotations.interest) std::sort(v.begin(), v.end());
  for (auto& v : data.annotations.conflict) std::sort(v.begin(), v.end());

  abstracts.resize(n);
  data.corpus.abstracts.resize(n);
  std::vector<bool> has_bid(n, false);
  for (const Bid& bid : data.bids) has_bid[bid.paper.index()] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (abstracts[i]) {
      data.corpus.abstracts[i] = std::move(*abstracts[i]);
    } else if (has_bid[i]) {
      throw DataError(paths.abstracts + ": no abstract entry for paper '" +
                      data.papers.Name(PaperId(static_cast<int>(i))) + "'");
    }
  }

  data.coauthors.Resize(m);
  for (const auto& [a, b, count, line] : coauthor_rows) {
    if (!data.coauthors.Add(a, b, count)) {
      throw DataError(paths.coauthors + ":" + std::to_string(line) +
                      ": duplicate co-author pair");
    }
  }
  return data;
}

inline Dataset LoadDataset(const std::filesystem::path& dir) {
  return LoadDataset(DataPaths::InDirectory(dir));
}

// Writes the five data files into `dir` (created if needed).
inline void WriteDataset(const Dataset& data,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const DataPaths paths = DataPaths::InDirectory(dir);
  {
    auto out = OpenOutput(paths.bids);
    WriteCsvRow(out, {"reviewer", "paper", "rating"});
    for (const Bid& bid : data.bids) {
      WriteCsvRow(out, {data.reviewers.Name(bid.reviewer),
                        data.papers.Name(bid.paper),
                        std::to_string(bid.rating)});
    }
  }
  {
    auto out = OpenOutput(paths.paper_categories);
    WriteCsvRow(out, {"paper", "primary", "secondary"});
    for (std::size_t i = 0; i < data.num_papers(); ++i) {
      WriteCsvRow(out,
                  {data.papers.Name(PaperId(static_cast<int>(i))),
                   data.categories.Name(data.annotations.primary[i]),
                   data.categories.Name(data.annotations.secondary[i])});
    }
  }
  {
    auto out = OpenOutput(paths.reviewer_categories);
    WriteCsvRow(out, {"reviewer", "category", "relation"});
    for (std::size_t u = 0; u < data.num_reviewers(); ++u) {
      const auto& name = data.reviewers.Name(ReviewerId(static_cast<int>(u)));
      for (CategoryId c : data.annotations.interest[u]) {
        WriteCsvRow(out, {name, data.categories.Name(c), "interest"});
      }
      for (CategoryId c : data.annotations.conflict[u]) {
        WriteCsvRow(out, {name, data.categories.Name(c), "conflict"});
      }
    }
  }
  {
    auto out = OpenOutput(paths.abstracts);
    for (std::size_t i = 0; i < data.num_papers(); ++i) {
      out << data.papers.Name(PaperId(static_cast<int>(i))) << '\t'
          << internal::EscapeAbstract(data.corpus.abstracts[i]) << '\n';
    }
  }
  {
    auto out = OpenOutput(paths.coauthors);
    WriteCsvRow(out, {"reviewer_a", "reviewer_b", "count"});
    for (std::size_t u = 0; u < data.coauthors.reviewers(); ++u) {
      const ReviewerId a(static_cast<int>(u));
      for (const auto& [b, count] : data.coauthors.Row(a)) {
        if (b <= a) continue;
        WriteCsvRow(out, {data.reviewers.Name(a), data.reviewers.Name(b),
                          std::to_string(count)});
      }
    }
  }
}

// Arithmetic mean of the ratings.
inline double GlobalMean(const BidSet& bids) {
  if (bids.empty()) throw DataError("global mean of an empty bid set");
  double sum = 0.0;
  for (const Bid& bid : bids) sum += bid.rating;
  return sum / static_cast<double>(bids.size());
}

// Uniform random train/test partition. The test side holds
// round(test_fraction * |bids|) bids, clamped so neither side is empty.
// Both sides keep the relative order of `bids`.
inline Split MakeSplit(const BidSet& bids, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie in (0, 1)");
  }
  if (bids.size() < 2) throw DataError("cannot split fewer than 2 bids");
  const std::size_t total = bids.size();
  auto test_size = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(total)));
  test_size = std::clamp<std::size_t>(test_size, 1, total - 1);

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> in_test(total, false);
  for (std::size_t k = 0; k < test_size; ++k) in_test[order[k]] = true;

  Split split;
  split.seed = seed;
  split.test_fraction = test_fraction;
  split.train.reserve(total - test_size);
  split.test.reserve(test_size);
  for (std::size_t k = 0; k < total; ++k) {
    (in_test[k] ? split.test : split.train).push_back(bids[k]);
  }
  return split;
}

inline Split MakeSplit(const Dataset& data, double test_fraction,
                       std::uint64_t seed) {
  return MakeSplit(data.bids, test_fraction, seed);
}

}  // namespace revmatch

#endif  // REVMATCH_DATASET_H_
