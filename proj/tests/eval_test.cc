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


#include <random>

#include "gtest/gtest.h"
#include "revmatch/eval.h"
#include "test_util.h"

namespace revmatch {
namespace {

CategoryAnnotations Annotations() {
  // Paper 0: primary 0, secondary 1. Reviewers: 0 interested in both,
  // 1 conflicted with both, 2 neutral, 3 interested in 0 and conflicted
  // with 1.
  CategoryAnnotations ann;
  ann.primary = {CategoryId(0)};
  ann.secondary = {CategoryId(1)};
  ann.interest = {{CategoryId(0), CategoryId(1)}, {}, {}, {CategoryId(0)}};
  ann.conflict = {{}, {CategoryId(0), CategoryId(1)}, {}, {CategoryId(1)}};
  return ann;
}

TEST(TopicalScore, Examples) {
  const CategoryAnnotations ann = Annotations();
  EXPECT_EQ(TopicalScoreOf(ann, ReviewerId(0), PaperId(0)), 3);
  EXPECT_EQ(TopicalScoreOf(ann, ReviewerId(1), PaperId(0)), -3);
  EXPECT_EQ(TopicalScoreOf(ann, ReviewerId(2), PaperId(0)), 0);
  EXPECT_EQ(TopicalScoreOf(ann, ReviewerId(3), PaperId(0)), 1);
}

TEST(TopicalRelevance, SumsOverAssignedPairs) {
  const CategoryAnnotations ann = Annotations();
  Assignment r(4, 1);
  r.Set(0, 0, true);
  r.Set(1, 0, true);
  r.Set(3, 0, true);
  const TopicalScore s = TopicalRelevance(r, ann);
  EXPECT_EQ(s.per_assignment, (std::vector<int>{3, -3, 1}));
  EXPECT_EQ(s.total, 1);
  EXPECT_THROW(TopicalRelevance(Assignment(5, 1), ann), DataError);
}

Assignment Diagonal(int size) {
  Assignment r(size, size);
  for (int k = 0; k < size; ++k) r.Set(k, k, true);
  return r;
}

TEST(QualityOf, Examples) {
  const BidSet three_high = {{ReviewerId(0), PaperId(0), 4},
                             {ReviewerId(1), PaperId(1), 4},
                             {ReviewerId(2), PaperId(2), 4}};
  QualityHistogram h = QualityOf(Diagonal(3), three_high);
  EXPECT_EQ(h.high(), 3);
  EXPECT_EQ(h.ok() + h.low() + h.no() + h.unknown, 0);

  const BidSet off_diagonal = {{ReviewerId(0), PaperId(1), 4}};
  h = QualityOf(Diagonal(3), off_diagonal);
  EXPECT_EQ(h.rated_total(), 0);
  EXPECT_EQ(h.unknown, 3);
  EXPECT_EQ(h.Fraction(kHigh), 0.0);

  const BidSet mixed = {{ReviewerId(0), PaperId(0), 4},
                        {ReviewerId(1), PaperId(1), 4},
                        {ReviewerId(2), PaperId(2), 1},
                        {ReviewerId(3), PaperId(0), 3}};
  h = QualityOf(Diagonal(4), mixed);
  EXPECT_EQ(h.high(), 2);
  EXPECT_EQ(h.no(), 1);
  EXPECT_EQ(h.ok(), 0);
  EXPECT_EQ(h.unknown, 1);
  EXPECT_DOUBLE_EQ(h.Fraction(kHigh), 2.0 / 3.0);
}

TEST(Eval, RandomizedInvariants) {
  Rng rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = std::uniform_int_distribution<int>(1, 7)(rng);
    const int n = std::uniform_int_distribution<int>(1, 7)(rng);
    const Dataset data = testing::TinyDataset(m, n, 4, trial, /*full=*/false);
    Assignment r(m, n);
    for (int u = 0; u < m; ++u) {
      for (int j = 0; j < n; ++j) {
        r.Set(u, j, std::uniform_int_distribution<int>(0, 1)(rng));
      }
    }
    const QualityHistogram h = QualityOf(r, data.bids);
    EXPECT_EQ(h.total(), static_cast<int>(r.size()));
    EXPECT_LE(h.rated_total(), static_cast<int>(r.size()));
    double fractions = 0;
    for (int rating = kNo; rating <= kHigh; ++rating) {
      EXPECT_GE(h.rated[rating], 0);
      fractions += h.Fraction(rating);
    }
    if (h.rated_total() > 0) {
      EXPECT_NEAR(fractions, 1.0, 1e-12);
    }
    const TopicalScore s = TopicalRelevance(r, data.annotations);
    for (int v : s.per_assignment) {
      EXPECT_GE(v, -3);
      EXPECT_LE(v, 3);
    }
  }
}

}  // namespace
}  // namespace revmatch
