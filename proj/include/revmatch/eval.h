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

#ifndef REVMATCH_EVAL_H_
#define REVMATCH_EVAL_H_

// End-assignment quality metrics: topical relevance of the chosen pairs
// and how the chosen pairs fall on hidden (held-out) bids.

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "revmatch/assign.h"
#include "revmatch/dataset.h"
#include "revmatch/error.h"

namespace revmatch {

struct TopicalScore {
  std::vector<int> per_assignment;  // each in [-3, 3], in Pairs() order
  int total = 0;
};

// Dot product of the paper's category vector (primary 2, secondary 1) with
// the reviewer's (interest +1, conflict -1), summed over assigned pairs.
inline int TopicalScoreOf(const CategoryAnnotations& ann, ReviewerId u,
                          PaperId i) {
  auto reviewer_value = [&](CategoryId c) {
    switch (ann.RelationOf(u, c)) {
      case Relation::kInterest: return 1;
      case Relation::kConflict: return -1;
      case Relation::kNone: break;
    }
    return 0;
  };
  return 2 * reviewer_value(ann.primary[i.index()]) +
         reviewer_value(ann.secondary[i.index()]);
}

inline TopicalScore TopicalRelevance(const Assignment& assignment,
                                     const CategoryAnnotations& ann) {
  if (ann.primary.size() < assignment.papers() ||
      ann.secondary.size() < assignment.papers() ||
      ann.interest.size() < assignment.reviewers() ||
      ann.conflict.size() < assignment.reviewers()) {
    throw DataError("category annotations do not cover the assignment");
  }
  TopicalScore score;
  for (const auto& [u, i] : assignment.Pairs()) {
    const int s = TopicalScoreOf(ann, u, i);
    score.per_assignment.push_back(s);
    score.total += s;
  }
  return score;
}

struct QualityHistogram {
  // Index by rating 1..4; slot 0 is unused.
  std::array<int, 5> rated{};
  int unknown = 0;

  int high() const { return rated[kHigh]; }
  int ok() const { return rated[kOk]; }
  int low() const { return rated[kLow]; }
  int no() const { return rated[kNo]; }
  int rated_total() const { return high() + ok() + low() + no(); }
  int total() const { return rated_total() + unknown; }

  // Share of the hidden-rated assignments falling in `rating`; 0 when no
  // assignment hit a hidden bid.
  double Fraction(int rating) const {
    const int denom = rated_total();
    return denom == 0 ? 0.0 : static_cast<double>(rated[rating]) / denom;
  }

  bool operator==(const QualityHistogram&) const = default;
};

inline QualityHistogram QualityOf(const Assignment& assignment,
                                  const BidSet& hidden) {
  std::map<std::pair<int, int>, int> lookup;
  for (const Bid& bid : hidden) {
    lookup[{bid.reviewer.value, bid.paper.value}] = bid.rating;
  }
  QualityHistogram hist;
  for (const auto& [u, i] : assignment.Pairs()) {
    auto it = lookup.find({u.value, i.value});
    if (it == lookup.end()) {
      ++hist.unknown;
    } else {
      ++hist.rated[it->second];
    }
  }
  return hist;
}

}  // namespace revmatch

#endif  // REVMATCH_EVAL_H_
