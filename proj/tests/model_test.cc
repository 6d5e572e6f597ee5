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
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "revmatch/experiment.h"
#include "revmatch/model.h"
#include "revmatch/textsim.h"
#include "test_util.h"

namespace revmatch {
namespace {

using testing::TinyDataset;

ModelParams ParamsFor(const Dataset& data, int factors) {
  return ModelParams::Zero(data.num_reviewers(), data.num_papers(), factors,
                           data.num_categories());
}

TEST(PredictBaseline, Examples) {
  ModelParams p = ModelParams::Zero(1, 1, 1, 1);
  p.mu = 2.5;
  EXPECT_DOUBLE_EQ(PredictBaseline(p, ReviewerId(0), PaperId(0)), 2.5);
  p.reviewer_bias[0] = 0.3;
  p.paper_bias[0] = -0.1;
  EXPECT_DOUBLE_EQ(PredictBaseline(p, ReviewerId(0), PaperId(0)), 2.7);
  p.reviewer_bias[0] = 2.0;
  p.paper_bias[0] = 1.0;
  EXPECT_DOUBLE_EQ(PredictBaseline(p, ReviewerId(0), PaperId(0)), 5.5);
  EXPECT_THROW(PredictBaseline(p, ReviewerId(1), PaperId(0)), UsageError);
}

CategoryAnnotations OnePaperTwoCategories() {
  CategoryAnnotations ann;
  ann.primary = {CategoryId(0)};
  ann.secondary = {CategoryId(1)};
  ann.interest = {{CategoryId(0)}, {}, {}};
  ann.conflict = {{}, {CategoryId(1)}, {}};
  return ann;
}

TEST(CategoryTerm, Examples) {
  const CategoryAnnotations ann = OnePaperTwoCategories();
  EXPECT_DOUBLE_EQ(
      CategoryTerm(ann, {0.395121, 0.9}, ReviewerId(0), PaperId(0)), 0.395121);
  EXPECT_DOUBLE_EQ(CategoryTerm(ann, {0.7, 0.4}, ReviewerId(1), PaperId(0)),
                   -0.1);
  EXPECT_EQ(CategoryTerm(ann, {0.7, 0.4}, ReviewerId(2), PaperId(0)), 0.0);
}

TEST(CategoryTerm, Encodings) {
  const CategoryAnnotations ann = OnePaperTwoCategories();
  EXPECT_EQ(PaperWeight(ann, PaperId(0), CategoryId(0)), 1.0);
  EXPECT_EQ(PaperWeight(ann, PaperId(0), CategoryId(1)), 0.5);
  EXPECT_EQ(ReviewerWeight(ann, ReviewerId(0), CategoryId(0)), 1.0);
  EXPECT_EQ(ReviewerWeight(ann, ReviewerId(1), CategoryId(1)), -0.5);
  EXPECT_EQ(ReviewerWeight(ann, ReviewerId(2), CategoryId(0)), 0.0);
}

// Dataset with hand-picked abstracts: papers 0 and 1 identical, paper 2
// disjoint from both, paper 3 identical to 0.
Dataset NeighbourhoodData(BidSet bids) {
  Dataset data = TinyDataset(4, 4, 2, 1, /*full=*/false);
  data.corpus.abstracts = {"kernel graphs", "kernel graphs", "privacy",
                           "kernel graphs"};
  data.bids = std::move(bids);
  data.coauthors = CoauthorCounts(4);
  return data;
}

TEST(PaperPaperTerm, Examples) {
  const Dataset data = NeighbourhoodData({{ReviewerId(0), PaperId(1), 4},
                                          {ReviewerId(1), PaperId(1), 4},
                                          {ReviewerId(1), PaperId(3), 2},
                                          {ReviewerId(2), PaperId(2), 3}});
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  const TrainingView view(data, data.bids, sims);
  EXPECT_NEAR(PaperPaperTerm(view, 0.001, ReviewerId(0), PaperId(0)),
              4.0 / 1.001, 1e-12);
  EXPECT_NEAR(PaperPaperTerm(view, 1e-12, ReviewerId(1), PaperId(0)), 3.0,
              1e-9);
  EXPECT_EQ(PaperPaperTerm(view, 0.001, ReviewerId(2), PaperId(0)), 0.0);
  EXPECT_EQ(PaperPaperTerm(view, 0.0, ReviewerId(2), PaperId(0)), 0.0);
  EXPECT_EQ(PaperPaperTerm(view, 0.001, ReviewerId(3), PaperId(0)), 0.0);
  // The target paper's own rating is excluded.
  EXPECT_EQ(PaperPaperTerm(view, 0.001, ReviewerId(2), PaperId(2)), 0.0);
}

TEST(ReviewerReviewerTerm, Examples) {
  Dataset data = NeighbourhoodData({{ReviewerId(1), PaperId(0), 4},
                                    {ReviewerId(2), PaperId(1), 4},
                                    {ReviewerId(3), PaperId(1), 2},
                                    {ReviewerId(0), PaperId(2), 1}});
  data.coauthors.Add(ReviewerId(0), ReviewerId(1), 3);
  data.coauthors.Add(ReviewerId(0), ReviewerId(2), 1);
  data.coauthors.Add(ReviewerId(0), ReviewerId(3), 1);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  const TrainingView view(data, data.bids, sims);
  EXPECT_NEAR(ReviewerReviewerTerm(view, 0.001, ReviewerId(0), PaperId(0)),
              12.0 / 3.001, 1e-12);
  EXPECT_NEAR(ReviewerReviewerTerm(view, 1e-12, ReviewerId(0), PaperId(1)),
              3.0, 1e-9);
  // Reviewer 1's only co-author (0) rated paper 2, but 0 did not rate 3.
  EXPECT_EQ(ReviewerReviewerTerm(view, 0.001, ReviewerId(1), PaperId(3)), 0.0);
  EXPECT_EQ(ReviewerReviewerTerm(view, 0.0, ReviewerId(1), PaperId(3)), 0.0);
  // The reviewer's own rating is excluded.
  EXPECT_EQ(ReviewerReviewerTerm(view, 0.001, ReviewerId(0), PaperId(2)), 0.0);
}

TEST(Predict, DegenerateCases) {
  const Dataset data = TinyDataset(3, 3, 3, 2);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  const TrainingView view(data, data.bids, sims);
  ModelParams p = ParamsFor(data, 2);
  p.mu = 2.75;
  ModelConfig config;
  config.terms = EnabledTerms::None();
  EXPECT_EQ(Predict(p, config, view, ReviewerId(1), PaperId(2)), 2.75);
  config.terms = TermsForVariant(2);
  p.reviewer_bias = {0.1, 0.2, 0.3};
  EXPECT_EQ(Predict(p, config, view, ReviewerId(1), PaperId(2)),
            PredictBaseline(p, ReviewerId(1), PaperId(2)));
}

// Independent evaluation of the full prediction rule from raw inputs.
double OraclePredict(const Dataset& data, const BidSet& train,
                     const ModelParams& p, double alpha, double beta, int u,
                     int i) {
  const auto& ann = data.annotations;
  double value = p.mu + p.reviewer_bias[u] + p.paper_bias[i];
  for (std::size_t k = 0; k < p.num_factors(); ++k) {
    value += p.reviewer_factors(u, k) * p.paper_factors(i, k);
  }
  for (std::size_t c = 0; c < data.num_categories(); ++c) {
    double sigma = 0.0, theta = 0.0;
    if (ann.primary[i].index() == c) sigma = 1.0;
    if (ann.secondary[i].index() == c) sigma = 0.5;
    for (auto x : ann.interest[u]) theta = x.index() == c ? 1.0 : theta;
    for (auto x : ann.conflict[u]) theta = x.index() == c ? -0.5 : theta;
    value += sigma * theta * p.category_weights[c];
  }
  double pn = 0.0, pd = 0.0, rn = 0.0, rd = 0.0;
  const TermVector vi = Vectorize(data.corpus.abstracts[i]);
  for (const Bid& b : train) {
    if (b.reviewer.value == u && b.paper.value != i) {
      const double c = Cosine(vi, Vectorize(data.corpus.abstracts[b.paper.index()]));
      const double s = c * c < 1e-6 ? 0.0 : c * c;
      pn += s * b.rating;
      pd += s;
    }
    if (b.paper.value == i && b.reviewer.value != u) {
      const double s = data.coauthors.Count(ReviewerId(u), b.reviewer);
      rn += s * b.rating;
      rd += s;
    }
  }
  if (pn != 0.0) value += p.gamma * pn / (alpha + pd);
  if (rn != 0.0) value += p.phi * rn / (beta + rd);
  return value;
}

TEST(Predict, MatchesIndependentEvaluation) {
  for (int seed = 0; seed < 10; ++seed) {
    const Dataset data = TinyDataset(seed < 5 ? 2 : 4, seed < 5 ? 2 : 5, 3,
                                     50 + seed, seed >= 5 ? false : true);
    const PaperSimilarity sims = PaperSimilarities(data.corpus);
    const TrainingView view(data, data.bids, sims);
    ModelParams p = ParamsFor(data, 2);
    Rng rng(seed);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    p.mu = 2.5;
    for (double& v : p.reviewer_bias) v = value(rng);
    for (double& v : p.paper_bias) v = value(rng);
    for (double& v : p.reviewer_factors.data()) v = value(rng);
    for (double& v : p.paper_factors.data()) v = value(rng);
    for (double& v : p.category_weights) v = std::fabs(value(rng));
    p.gamma = value(rng);
    p.phi = value(rng);
    const ModelConfig config;
    for (std::size_t u = 0; u < data.num_reviewers(); ++u) {
      for (std::size_t i = 0; i < data.num_papers(); ++i) {
        EXPECT_NEAR(Predict(p, config, view, ReviewerId(u), PaperId(i)),
                    OraclePredict(data, data.bids, p, config.alpha,
                                  config.beta, u, i),
                    1e-12);
      }
    }
  }
}

TEST(Predict, NestingReproducesBaseline) {
  const Dataset data = TinyDataset(4, 5, 3, 8, /*full=*/false);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  const TrainingView view(data, data.bids, sims);
  ModelParams p = ParamsFor(data, 3);
  p.mu = 2.4;
  p.reviewer_bias = {0.1, -0.3, 0.2, 0.0};
  p.paper_bias = {0.5, -0.5, 0.25, 0.0, 1.0};
  for (int variant = 1; variant <= 8; ++variant) {
    ModelConfig config;
    config.terms = TermsForVariant(variant);
    for (std::size_t u = 0; u < 4; ++u) {
      for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(Predict(p, config, view, ReviewerId(u), PaperId(i)),
                  PredictBaseline(p, ReviewerId(u), PaperId(i)));
      }
    }
  }
}

TEST(Rmse, Examples) {
  const Dataset data = TinyDataset(1, 2, 2, 3);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  const BidSet bids = {{ReviewerId(0), PaperId(0), 1},
                       {ReviewerId(0), PaperId(1), 4}};
  const TrainingView view(data, bids, sims);
  ModelConfig config;
  config.terms = EnabledTerms::None();
  ModelParams p = ParamsFor(data, 1);
  p.mu = 2.5;
  EXPECT_DOUBLE_EQ(Rmse(p, config, view, bids), 1.5);
  p.paper_bias = {-1.5, 1.5};
  EXPECT_EQ(Rmse(p, config, view, bids), 0.0);
  EXPECT_THROW(Rmse(p, config, view, {}), DataError);
}

TEST(Terms, VariantsAndParsing) {
  EXPECT_EQ(TermsForVariant(1), EnabledTerms::None());
  EXPECT_EQ(TermsForVariant(8), EnabledTerms::All());
  EXPECT_THROW(TermsForVariant(0), UsageError);
  EXPECT_THROW(TermsForVariant(9), UsageError);
  for (int v = 1; v <= 8; ++v) {
    const EnabledTerms t = TermsForVariant(v);
    EXPECT_EQ(EnabledTerms::Parse(t.ToString()), t) << v;
  }
  EXPECT_THROW(EnabledTerms::Parse("factors,bogus"), UsageError);
  // Each richer variant enables a superset of 1's terms; 6 extends 4.
  const EnabledTerms four = TermsForVariant(4), six = TermsForVariant(6);
  EXPECT_TRUE(six.factors && six.categories && four.factors && four.categories);
  EXPECT_TRUE(six.paper_paper && !four.paper_paper);
}

TEST(ModelConfig, KeyValueRoundTrip) {
  ModelConfig config;
  config.factors = 7;
  config.lambda_factors = 0.125;
  config.learning_rate = 1e-3;
  config.seed = 99;
  config.terms = TermsForVariant(6);
  ModelConfig copy;
  for (const auto& [k, v] : config.ToKeyValues()) EXPECT_TRUE(copy.Set(k, v));
  EXPECT_EQ(copy, config);
  EXPECT_FALSE(copy.Set("no_such_key", "1"));
  EXPECT_THROW(copy.Set("factors", "many"), UsageError);
  config.learning_rate = 0;
  EXPECT_THROW(config.Validate(), UsageError);
}

TEST(Gradient, MatchesFiniteDifferences) {
  const Dataset data = TinyDataset(3, 3, 3, 21);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  const TrainingView view(data, data.bids, sims);
  ModelConfig config;
  config.factors = 2;
  config.init_scale = 0.5;
  ModelParams p = InitialParams(data, data.bids, config);
  p.reviewer_bias = {0.2, -0.1, 0.3};
  p.paper_bias = {-0.2, 0.1, 0.05};
  p.category_weights = {0.3, 0.6, 0.9};
  p.gamma = 0.2;
  p.phi = 0.4;
  const auto samples = FeaturesFor(config, view, data.bids);
  const ModelParams g = Gradient(p, config, samples);
  auto numeric = [&](double* slot) {
    const double saved = *slot;
    *slot = saved + 1e-5;
    const double up = Objective(p, config, samples);
    *slot = saved - 1e-5;
    const double down = Objective(p, config, samples);
    *slot = saved;
    return (up - down) / 2e-5;
  };
  auto expect_close = [](double analytic, double fd) {
    EXPECT_LE(std::fabs(analytic - fd),
              1e-4 * std::max({std::fabs(analytic), std::fabs(fd), 1e-6}));
  };
  for (std::size_t u = 0; u < 3; ++u) {
    expect_close(g.reviewer_bias[u], numeric(&p.reviewer_bias[u]));
    expect_close(g.reviewer_factors(u, 1), numeric(&p.reviewer_factors(u, 1)));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    expect_close(g.paper_bias[i], numeric(&p.paper_bias[i]));
    expect_close(g.paper_factors(i, 0), numeric(&p.paper_factors(i, 0)));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    expect_close(g.category_weights[c], numeric(&p.category_weights[c]));
  }
  expect_close(g.gamma, numeric(&p.gamma));
  expect_close(g.phi, numeric(&p.phi));
  EXPECT_EQ(g.mu, 0.0);
}

TEST(Train, DeterministicForSeed) {
  const Dataset data = TinyDataset(6, 8, 4, 4, /*full=*/false);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig config;
  config.factors = 5;
  config.epochs = 15;
  const ModelParams a = Train(data, data.bids, sims, config);
  const ModelParams b = Train(data, data.bids, sims, config);
  EXPECT_EQ(a, b);
  config.seed = 2;
  EXPECT_NE(Train(data, data.bids, sims, config), a);
  EXPECT_TRUE(a.AllFinite());
}

// Per-epoch descent is only guaranteed below the documented stability
// threshold (learning_rate <= 5e-4).
TEST(Train, ObjectiveNonIncreasingAtStableRate) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset data = TinyDataset(8, 10, 4, seed, /*full=*/false);
    const PaperSimilarity sims = PaperSimilarities(data.corpus);
    for (double rate : {2e-4, 5e-4}) {
      ModelConfig config;
      config.factors = 4;
      config.epochs = 100;
      config.learning_rate = rate;
      TrainingLog log;
      Train(data, data.bids, sims, config, &log);
      ASSERT_EQ(log.objective.size(), 101u);
      for (std::size_t e = 1; e < log.objective.size(); ++e) {
        EXPECT_LE(log.objective[e], log.objective[e - 1] + 1e-6)
            << "seed " << seed << " rate " << rate << " epoch " << e;
      }
      EXPECT_LT(log.objective.back(), log.objective.front());
    }
  }
}

TEST(Train, CategoryWeightsStayNonNegative) {
  const Dataset data = TinyDataset(8, 10, 4, 6, /*full=*/false);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig config;
  config.terms = TermsForVariant(3);
  config.learning_rate = 0.05;
  config.epochs = 30;
  for (double w : Train(data, data.bids, sims, config).category_weights) {
    EXPECT_GE(w, 0.0);
  }
}

TEST(Train, RecoversPlantedBiases) {
  // r = 2.5 + b_u + b_i with b_u in {-0.5, 0.5}, b_i in {-1, 0, 1}.
  const int m = 12, n = 15;
  Dataset data = TinyDataset(m, n, 3, 7);
  data.bids.clear();
  std::vector<double> truth(m * n);
  for (int u = 0; u < m; ++u) {
    for (int i = 0; i < n; ++i) {
      const double r = 2.5 + (u % 2 ? 0.5 : -0.5) + (i % 3 - 1);
      truth[u * n + i] = r;
      data.bids.push_back({ReviewerId(u), PaperId(i), static_cast<int>(r)});
    }
  }
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig config;
  config.terms = TermsForVariant(1);
  config.lambda_reviewer_bias = config.lambda_paper_bias = 1e-4;
  config.learning_rate = 0.01;
  config.learning_rate_decay = 0.99;
  config.epochs = 400;
  const ModelParams p = Train(data, data.bids, sims, config);
  double sq = 0.0;
  for (int u = 0; u < m; ++u) {
    for (int i = 0; i < n; ++i) {
      const double e =
          PredictBaseline(p, ReviewerId(u), PaperId(i)) - truth[u * n + i];
      sq += e * e;
    }
  }
  EXPECT_LT(std::sqrt(sq / (m * n)), 1e-2);
}

TEST(Train, CategoryDrivingRatingsGetsLargestWeight) {
  Dataset data = TinyDataset(30, 40, 5, 8);
  data.bids.clear();
  const CategoryId driver(2);
  for (std::size_t u = 0; u < 30; ++u) {
    for (std::size_t i = 0; i < 40; ++i) {
      const double x = PaperWeight(data.annotations, PaperId(i), driver) *
                       ReviewerWeight(data.annotations, ReviewerId(u), driver);
      const int r = std::clamp(static_cast<int>(std::lround(2 + 2 * x)), 1, 4);
      data.bids.push_back({ReviewerId(u), PaperId(i), r});
    }
  }
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig config;
  config.terms = TermsForVariant(3);
  config.epochs = 80;
  config.learning_rate = 0.01;
  const ModelParams p = Train(data, data.bids, sims, config);
  const auto top = std::max_element(p.category_weights.begin(),
                                    p.category_weights.end()) -
                   p.category_weights.begin();
  EXPECT_EQ(top, driver.value);
}

TEST(Train, DivergenceNamesEpoch) {
  const Dataset data = TinyDataset(5, 5, 3, 9);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig config;
  config.learning_rate = 1e3;
  config.epochs = 50;
  try {
    Train(data, data.bids, sims, config);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    EXPECT_EQ(e.exit_code(), 4);
  }
}

TEST(Train, RejectsEmptyTrainingSet) {
  const Dataset data = TinyDataset(2, 2, 2, 1);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  EXPECT_THROW(Train(data, BidSet{}, sims, ModelConfig{}), DataError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const Dataset data = TinyDataset(4, 6, 3, 10, /*full=*/false);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig config;
  config.factors = 3;
  config.epochs = 5;
  config.terms = TermsForVariant(6);
  const Checkpoint ckpt{config, Train(data, data.bids, sims, config)};
  std::stringstream buffer;
  WriteCheckpoint(buffer, ckpt);
  const Checkpoint back = ReadCheckpoint(buffer, "buffer");
  EXPECT_EQ(back, ckpt);
}

TEST(Checkpoint, RejectsCorruptInput) {
  std::stringstream bad_magic("not a checkpoint\n");
  EXPECT_THROW(ReadCheckpoint(bad_magic, "x"), DataError);
  const Dataset data = TinyDataset(2, 2, 2, 1);
  Checkpoint ckpt{ModelConfig{}, ParamsFor(data, 2)};
  ckpt.config.factors = 2;
  std::stringstream buffer;
  WriteCheckpoint(buffer, ckpt);
  std::string text = buffer.str();
  text = text.substr(0, text.rfind("q.1"));
  std::stringstream truncated(text);
  EXPECT_THROW(ReadCheckpoint(truncated, "x"), DataError);
}

TEST(RmseExperiment, OneIterationEqualsSingleRun) {
  const Dataset data = TinyDataset(6, 8, 3, 11, /*full=*/false);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig base;
  base.factors = 3;
  base.epochs = 10;
  RmseExperimentOptions options;
  options.iterations = 1;
  options.master_seed = 5;
  options.variants = {1, 8};
  const RmseReport report = RunRmseExperiment(data, sims, base, options);
  const Split split = MakeSplit(data.bids, options.test_fraction, SplitSeed(5, 0));
  for (int v : {1, 8}) {
    ModelConfig config = base;
    config.terms = TermsForVariant(v);
    config.seed = ModelSeed(5, 0);
    const TrainingView view(data, split.train, sims);
    const ModelParams p = Train(data, view, split.train, config);
    EXPECT_EQ(report.Variant(v).summary.mean,
              Rmse(p, config, view, split.test));
  }
}

TEST(RmseExperiment, MeanWithinRangeAndThreadIndependent) {
  const Dataset data = TinyDataset(6, 8, 3, 12, /*full=*/false);
  const PaperSimilarity sims = PaperSimilarities(data.corpus);
  ModelConfig base;
  base.factors = 3;
  base.epochs = 10;
  RmseExperimentOptions options;
  options.iterations = 6;
  options.test_fraction = 0.2;
  const RmseReport serial = RunRmseExperiment(data, sims, base, options);
  options.jobs = 3;
  const RmseReport threaded = RunRmseExperiment(data, sims, base, options);
  ASSERT_EQ(serial.variants.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) {
    const Summary& s = serial.variants[k].summary;
    EXPECT_GE(s.mean, s.min);
    EXPECT_LE(s.mean, s.max);
    EXPECT_EQ(serial.variants[k].rmse, threaded.variants[k].rmse);
  }
}

}  // namespace
}  // namespace revmatch
