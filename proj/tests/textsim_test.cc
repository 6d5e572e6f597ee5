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


#include <cmath>
#include <random>
#include <string>

#include "gtest/gtest.h"
#include "revmatch/random.h"
#include "revmatch/textsim.h"

namespace revmatch {
namespace {

TEST(Vectorize, CountsTerms) {
  const TermVector v = Vectorize("Data Mining data");
  EXPECT_EQ(v, (TermVector{{"data", 2.0}, {"mining", 1.0}}));
}

TEST(Vectorize, EmptyAndStopwords) {
  EXPECT_TRUE(Vectorize("").empty());
  EXPECT_TRUE(Vectorize("the of and").empty());
  EXPECT_TRUE(Vectorize("a b c ! ?").empty());
}

TEST(Vectorize, PunctuationSeparates) {
  const TermVector v = Vectorize("graph-based, (Graph) mining.");
  EXPECT_EQ(v.at("graph"), 2.0);
  EXPECT_EQ(v.at("based"), 1.0);
  EXPECT_EQ(v.at("mining"), 1.0);
}

TEST(Cosine, Examples) {
  const TermVector ab = {{"a", 1.0}, {"b", 1.0}};
  const TermVector a = {{"a", 1.0}};
  const TermVector c = {{"c", 2.0}};
  EXPECT_NEAR(Cosine(ab, ab), 1.0, 1e-15);
  EXPECT_EQ(Cosine(ab, c), 0.0);
  EXPECT_NEAR(Cosine(ab, a), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(Cosine({}, a), 0.0);
  EXPECT_EQ(Cosine({}, {}), 0.0);
}

TEST(Cosine, PropertiesOnRandomVectors) {
  Rng rng(5);
  std::uniform_real_distribution<double> weight(0.0, 3.0);
  std::uniform_int_distribution<int> term(0, 9);
  for (int trial = 0; trial < 500; ++trial) {
    TermVector a, b;
    for (int k = 0; k < 5; ++k) {
      a["t" + std::to_string(term(rng))] = weight(rng) + 0.01;
      b["t" + std::to_string(term(rng))] = weight(rng) + 0.01;
    }
    const double ab = Cosine(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(ab, Cosine(b, a));
    TermVector scaled = a;
    for (auto& [t, w] : scaled) w *= 7.5;
    EXPECT_NEAR(Cosine(scaled, b), ab, 1e-12);
    EXPECT_NEAR(Cosine(a, a), 1.0, 1e-12);
  }
}

Corpus MakeCorpus(std::vector<std::string> texts) {
  Corpus c;
  c.abstracts = std::move(texts);
  return c;
}

TEST(PaperSimilarities, Examples) {
  const PaperSimilarity s = PaperSimilarities(MakeCorpus(
      {"kernel methods", "kernel methods", "kernel graphs", "", "kernel"}));
  EXPECT_NEAR(s(PaperId(0), PaperId(1)), 1.0, 1e-12);
  // cos = 1/sqrt(2), squared.
  EXPECT_NEAR(s(PaperId(0), PaperId(4)), 0.5, 1e-12);
  EXPECT_EQ(s(PaperId(3), PaperId(0)), 0.0);
  EXPECT_EQ(s(PaperId(3), PaperId(3)), 0.0);
  EXPECT_NEAR(s(PaperId(2), PaperId(2)), 1.0, 1e-12);
}

TEST(PaperSimilarities, SymmetricBoundedAndMatchesCosine) {
  Rng rng(9);
  const char* words[] = {"alpha", "beta", "gamma", "delta", "epsilon",
                         "zeta", "eta", "theta"};
  std::vector<std::string> texts;
  for (int i = 0; i < 30; ++i) {
    std::string t;
    const int len = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int w = 0; w < len; ++w) {
      t += words[std::uniform_int_distribution<int>(0, 7)(rng)];
      t += ' ';
    }
    texts.push_back(t);
  }
  const Corpus corpus = MakeCorpus(texts);
  const PaperSimilarity s = PaperSimilarities(corpus);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) {
      const double v = s(PaperId(i), PaperId(j));
      EXPECT_EQ(v, s(PaperId(j), PaperId(i)));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      const double c = Cosine(Vectorize(texts[i]), Vectorize(texts[j]));
      const double want = c * c >= 1e-6 ? c * c : 0.0;
      EXPECT_NEAR(v, want, 1e-12) << i << "," << j;
    }
  }
}

TEST(PaperSimilarities, ExponentOne) {
  SimilarityConfig config;
  config.exponent = 1.0;
  const PaperSimilarity s =
      PaperSimilarities(MakeCorpus({"kernel methods", "kernel"}), config);
  EXPECT_NEAR(s(PaperId(0), PaperId(1)), 1.0 / std::sqrt(2.0), 1e-12);
}

}  // namespace
}  // namespace revmatch
