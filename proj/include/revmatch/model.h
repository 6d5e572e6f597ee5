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

#ifndef REVMATCH_MODEL_H_
#define REVMATCH_MODEL_H_

// Reviewer-paper preference predictors. The full rule is
//
//   r_ui ~ mu + b_u + b_i + p_u.q_i + sum_c sigma_ic theta_uc w_c
//        + gamma * sum_{j in R(u)} s_ij r_uj / (alpha + sum_{j in R(u)} s_ij)
//        + phi   * sum_{v in R(i)} s_uv r_vi / (beta  + sum_{v in R(i)} s_uv)
//
// where sigma_ic is 1 / 0.5 / 0 for the paper's primary / secondary / other
// categories, theta_uc is 1 / -0.5 / 0 for the reviewer's interest /
// conflict / other categories, s_ij are abstract similarities and s_uv
// co-authorship counts. Each additive term can be switched off, which gives
// the family of nested models from bias-only up to the full rule.
//
// Parameters are fitted by stochastic gradient descent on
//
//   J = sum_{(u,i) in train} [ e_ui^2 + l1 b_u^2 + l2 b_i^2
//                              + lpq (|p_u|^2 + |q_i|^2)
//                              + lw sum_{c : sigma_ic theta_uc != 0} w_c^2 ]
//
// The neighbourhood quotients only involve observed ratings, so they are
// constants per training pair; gamma and phi are plain linear weights.
// When the pair (u,i) itself is a training bid, paper i is left out of R(u)
// and reviewer u out of R(i). Predictions always apply the same rule, which
// is a no-op for pairs without a bid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "revmatch/csv.h"
#include "revmatch/dataset.h"
#include "revmatch/error.h"
#include "revmatch/matrix.h"
#include "revmatch/random.h"
#include "revmatch/textsim.h"

namespace revmatch {

struct EnabledTerms {
  bool factors = true;
  bool categories = true;
  bool paper_paper = true;
  bool reviewer_reviewer = true;

  static constexpr EnabledTerms None() { return {false, false, false, false}; }
  static constexpr EnabledTerms All() { return {true, true, true, true}; }

  bool operator==(const EnabledTerms&) const = default;

  std::string ToString() const {
    std::string out;
    auto add = [&out](bool on, const char* name) {
      if (!on) return;
      if (!out.empty()) out.push_back(',');
      out += name;
    };
    add(factors, "factors");
    add(categories, "categories");
    add(paper_paper, "paper_paper");
    add(reviewer_reviewer, "reviewer_reviewer");
    return out.empty() ? "none" : out;
  }

  static EnabledTerms Parse(const std::string& text) {
    EnabledTerms terms = None();
    if (text == "none") return terms;
    if (text == "all") return All();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "factors") {
        terms.factors = true;
      } else if (item == "categories") {
        terms.categories = true;
      } else if (item == "paper_paper") {
        terms.paper_paper = true;
      } else if (item == "reviewer_reviewer") {
        terms.reviewer_reviewer = true;
      } else {
        throw UsageError("unknown model term '" + item + "'");
      }
    }
    return terms;
  }
};

// The eight nested model variants, numbered 1..8 from bias-only to the
// full rule.
inline EnabledTerms TermsForVariant(int variant) {
  switch (variant) {
    case 1: return EnabledTerms::None();
    case 2: return {true, false, false, false};
    case 3: return {false, true, false, false};
    case 4: return {true, true, false, false};
    case 5: return {false, false, true, false};
    case 6: return {true, true, true, false};
    case 7: return {false, false, false, true};
    case 8: return EnabledTerms::All();
    default:
      throw UsageError("model variant must be in 1..8, got " +
                       std::to_string(variant));
  }
}

struct ModelConfig {
  int factors = 100;
  double lambda_reviewer_bias = 0.05;
  double lambda_paper_bias = 0.05;
  double lambda_factors = 0.05;
  double lambda_category = 0.05;
  double learning_rate = 0.005;
  double learning_rate_decay = 1.0;  // multiplied into the rate per epoch
  int epochs = 60;
  double alpha = 0.001;  // paper-paper support regularizer
  double beta = 0.001;   // reviewer-reviewer support regularizer
  double init_scale = 0.005;
  double init_gamma = 0.1;
  double init_phi = 0.1;
  std::uint64_t seed = 1;
  EnabledTerms terms = EnabledTerms::All();

  bool operator==(const ModelConfig&) const = default;

  void Validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw UsageError(std::string("invalid model config: ") + what);
    };
    require(factors >= 1, "factors must be >= 1");
    require(lambda_reviewer_bias >= 0 && lambda_paper_bias >= 0 &&
                lambda_factors >= 0 && lambda_category >= 0,
            "regularizers must be >= 0");
    require(learning_rate > 0, "learning_rate must be > 0");
    require(learning_rate_decay > 0 && learning_rate_decay <= 1,
            "learning_rate_decay must lie in (0, 1]");
    require(epochs >= 1, "epochs must be >= 1");
    require(alpha >= 0 && beta >= 0, "alpha and beta must be >= 0");
    require(init_scale >= 0, "init_scale must be >= 0");
  }

  // Flat key/value form, used by checkpoints and run configs.
  std::vector<std::pair<std::string, std::string>> ToKeyValues() const {
    return {
        {"factors", std::to_string(factors)},
        {"lambda_reviewer_bias", FormatDouble(lambda_reviewer_bias)},
        {"lambda_paper_bias", FormatDouble(lambda_paper_bias)},
        {"lambda_factors", FormatDouble(lambda_factors)},
        {"lambda_category", FormatDouble(lambda_category)},
        {"learning_rate", FormatDouble(learning_rate)},
        {"learning_rate_decay", FormatDouble(learning_rate_decay)},
        {"epochs", std::to_string(epochs)},
        {"alpha", FormatDouble(alpha)},
        {"beta", FormatDouble(beta)},
        {"init_scale", FormatDouble(init_scale)},
        {"init_gamma", FormatDouble(init_gamma)},
        {"init_phi", FormatDouble(init_phi)},
        {"model_seed", std::to_string(seed)},
        {"terms", terms.ToString()},
    };
  }

  // Returns false if `key` is not a model key; throws on a bad value.
  bool Set(const std::string& key, const std::string& value) {
    auto as_double = [&](double* out) {
      if (!ParseDouble(value, out)) {
        throw UsageError("bad value for " + key + ": '" + value + "'");
      }
    };
    auto as_int = [&](long long* out) {
      if (!ParseInt(value, out)) {
        throw UsageError("bad value for " + key + ": '" + value + "'");
      }
    };
    long long integer = 0;
    if (key == "factors") {
      as_int(&integer);
      factors = static_cast<int>(integer);
    } else if (key == "lambda_reviewer_bias") {
      as_double(&lambda_reviewer_bias);
    } else if (key == "lambda_paper_bias") {
      as_double(&lambda_paper_bias);
    } else if (key == "lambda_factors") {
      as_double(&lambda_factors);
    } else if (key == "lambda_category") {
      as_double(&lambda_category);
    } else if (key == "learning_rate") {
      as_double(&learning_rate);
    } else if (key == "learning_rate_decay") {
      as_double(&learning_rate_decay);
    } else if (key == "epochs") {
      as_int(&integer);
      epochs = static_cast<int>(integer);
    } else if (key == "alpha") {
      as_double(&alpha);
    } else if (key == "beta") {
      as_double(&beta);
    } else if (key == "init_scale") {
      as_double(&init_scale);
    } else if (key == "init_gamma") {
      as_double(&init_gamma);
    } else if (key == "init_phi") {
      as_double(&init_phi);
    } else if (key == "model_seed") {
      as_int(&integer);
      seed = static_cast<std::uint64_t>(integer);
    } else if (key == "terms") {
      terms = EnabledTerms::Parse(value);
    } else {
      return false;
    }
    return true;
  }
};

struct ModelParams {
  double mu = 0.0;
  std::vector<double> reviewer_bias;   // b_u, length m
  std::vector<double> paper_bias;      // b_i, length n
  DenseMatrix<double> reviewer_factors;  // m x f, rows p_u
  DenseMatrix<double> paper_factors;     // n x f, rows q_i
  std::vector<double> category_weights;  // w_c, length K
  double gamma = 0.0;
  double phi = 0.0;

  bool operator==(const ModelParams&) const = default;

  std::size_t num_reviewers() const { return reviewer_bias.size(); }
  std::size_t num_papers() const { return paper_bias.size(); }
  std::size_t num_factors() const { return reviewer_factors.cols(); }

  static ModelParams Zero(std::size_t m, std::size_t n, std::size_t f,
                          std::size_t k) {
    ModelParams p;
    p.reviewer_bias.assign(m, 0.0);
    p.paper_bias.assign(n, 0.0);
    p.reviewer_factors = DenseMatrix<double>(m, f, 0.0);
    p.paper_factors = DenseMatrix<double>(n, f, 0.0);
    p.category_weights.assign(k, 0.0);
    return p;
  }

  template <typename Fn>
  void ForEachValue(Fn&& fn) const {
    fn(mu);
    fn(gamma);
    fn(phi);
    for (double v : reviewer_bias) fn(v);
    for (double v : paper_bias) fn(v);
    for (double v : reviewer_factors.data()) fn(v);
    for (double v : paper_factors.data()) fn(v);
    for (double v : category_weights) fn(v);
  }

  bool AllFinite() const {
    bool finite = true;
    ForEachValue([&finite](double v) { finite = finite && std::isfinite(v); });
    return finite;
  }
};

// Train-side ratings indexed both ways, plus the similarity sources the
// neighbourhood terms read. Holds references: `data` and `sims` must
// outlive the view.
class TrainingView {
 public:
  TrainingView(const Dataset& data, const BidSet& train,
               const PaperSimilarity& sims)
      : data_(data),
        sims_(sims),
        by_reviewer_(data.num_reviewers()),
        by_paper_(data.num_papers()) {
    for (const Bid& bid : train) {
      by_reviewer_.at(bid.reviewer.index()).emplace_back(bid.paper, bid.rating);
      by_paper_.at(bid.paper.index()).emplace_back(bid.reviewer, bid.rating);
    }
    for (auto& row : by_reviewer_) std::sort(row.begin(), row.end());
    for (auto& row : by_paper_) std::sort(row.begin(), row.end());
  }

  const Dataset& data() const { return data_; }
  const PaperSimilarity& sims() const { return sims_; }

  const std::vector<std::pair<PaperId, int>>& RatedBy(ReviewerId u) const {
    return by_reviewer_[u.index()];
  }
  const std::vector<std::pair<ReviewerId, int>>& RatersOf(PaperId i) const {
    return by_paper_[i.index()];
  }

 private:
  const Dataset& data_;
  const PaperSimilarity& sims_;
  std::vector<std::vector<std::pair<PaperId, int>>> by_reviewer_;
  std::vector<std::vector<std::pair<ReviewerId, int>>> by_paper_;
};

inline double PredictBaseline(const ModelParams& params, ReviewerId u,
                              PaperId i) {
  if (u.index() >= params.num_reviewers() || i.index() >= params.num_papers()) {
    throw UsageError("reviewer or paper index out of range");
  }
  return params.mu + params.reviewer_bias[u.index()] +
         params.paper_bias[i.index()];
}

inline double PaperWeight(const CategoryAnnotations& ann, PaperId i,
                          CategoryId c) {
  if (ann.primary[i.index()] == c) return 1.0;
  if (ann.secondary[i.index()] == c) return 0.5;
  return 0.0;
}

inline double ReviewerWeight(const CategoryAnnotations& ann, ReviewerId u,
                             CategoryId c) {
  switch (ann.RelationOf(u, c)) {
    case Relation::kInterest: return 1.0;
    case Relation::kConflict: return -0.5;
    case Relation::kNone: break;
  }
  return 0.0;
}

// Non-zero sigma_ic * theta_uc products for a pair; at most two because a
// paper has exactly two categories.
struct CategoryFeatures {
  CategoryId category[2];
  double value[2] = {0.0, 0.0};
  int count = 0;
};

inline CategoryFeatures CategoryFeaturesOf(const CategoryAnnotations& ann,
                                           ReviewerId u, PaperId i) {
  CategoryFeatures out;
  const CategoryId cats[2] = {ann.primary[i.index()], ann.secondary[i.index()]};
  for (CategoryId c : cats) {
    const double x = PaperWeight(ann, i, c) * ReviewerWeight(ann, u, c);
    if (x != 0.0) {
      out.category[out.count] = c;
      out.value[out.count] = x;
      ++out.count;
    }
  }
  return out;
}

inline double CategoryTerm(const CategoryAnnotations& ann,
                           const std::vector<double>& weights, ReviewerId u,
                           PaperId i) {
  const CategoryFeatures feats = CategoryFeaturesOf(ann, u, i);
  double sum = 0.0;
  for (int k = 0; k < feats.count; ++k) {
    sum += feats.value[k] * weights.at(feats.category[k].index());
  }
  return sum;
}

// Similarity-weighted average of u's ratings on papers similar to i.
inline double PaperPaperTerm(const TrainingView& view, double alpha,
                             ReviewerId u, PaperId i) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& [j, rating] : view.RatedBy(u)) {
    if (j == i) continue;
    const double s = view.sims()(i, j);
    num += s * rating;
    den += s;
  }
  if (num == 0.0 || alpha + den <= 0.0) return 0.0;
  return num / (alpha + den);
}

// Co-authorship-weighted average of other reviewers' ratings on i.
inline double ReviewerReviewerTerm(const TrainingView& view, double beta,
                                   ReviewerId u, PaperId i) {
  const auto& coauthors = view.data().coauthors.Row(u);
  if (coauthors.empty()) return 0.0;
  double num = 0.0;
  double den = 0.0;
  for (const auto& [v, rating] : view.RatersOf(i)) {
    if (v == u) continue;
    const double s = view.data().coauthors.Count(u, v);
    num += s * rating;
    den += s;
  }
  if (num == 0.0 || beta + den <= 0.0) return 0.0;
  return num / (beta + den);
}

// Everything about a (reviewer, paper) pair that does not depend on the
// learned parameters.
struct PairFeatures {
  ReviewerId reviewer;
  PaperId paper;
  double rating = 0.0;
  CategoryFeatures categories;
  double paper_paper = 0.0;
  double reviewer_reviewer = 0.0;
};

inline PairFeatures FeaturesOf(const ModelConfig& config,
                               const TrainingView& view, ReviewerId u,
                               PaperId i, double rating = 0.0) {
  PairFeatures f;
  f.reviewer = u;
  f.paper = i;
  f.rating = rating;
  if (config.terms.categories) {
    f.categories = CategoryFeaturesOf(view.data().annotations, u, i);
  }
  if (config.terms.paper_paper) {
    f.paper_paper = PaperPaperTerm(view, config.alpha, u, i);
  }
  if (config.terms.reviewer_reviewer) {
    f.reviewer_reviewer = ReviewerReviewerTerm(view, config.beta, u, i);
  }
  return f;
}

inline double PredictFromFeatures(const ModelParams& params,
                                  const ModelConfig& config,
                                  const PairFeatures& f) {
  const std::size_t u = f.reviewer.index();
  const std::size_t i = f.paper.index();
  double value = params.mu + params.reviewer_bias[u] + params.paper_bias[i];
  if (config.terms.factors) {
    const auto pu = params.reviewer_factors.row(u);
    const auto qi = params.paper_factors.row(i);
    value += std::inner_product(pu.begin(), pu.end(), qi.begin(), 0.0);
  }
  if (config.terms.categories) {
    for (int k = 0; k < f.categories.count; ++k) {
      value += f.categories.value[k] *
               params.category_weights[f.categories.category[k].index()];
    }
  }
  if (config.terms.paper_paper) value += params.gamma * f.paper_paper;
  if (config.terms.reviewer_reviewer) {
    value += params.phi * f.reviewer_reviewer;
  }
  return value;
}

// Unclamped prediction of r_ui from the enabled terms.
inline double Predict(const ModelParams& params, const ModelConfig& config,
                      const TrainingView& view, ReviewerId u, PaperId i) {
  if (u.index() >= params.num_reviewers() || i.index() >= params.num_papers()) {
    throw UsageError("reviewer or paper index out of range");
  }
  return PredictFromFeatures(params, config, FeaturesOf(config, view, u, i));
}

// All m x n predictions, unclamped.
inline DenseMatrix<double> PredictAll(const ModelParams& params,
                                      const ModelConfig& config,
                                      const TrainingView& view) {
  const std::size_t m = params.num_reviewers();
  const std::size_t n = params.num_papers();
  DenseMatrix<double> out(m, n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t i = 0; i < n; ++i) {
      out(u, i) = Predict(params, config, view, ReviewerId(static_cast<int>(u)),
                          PaperId(static_cast<int>(i)));
    }
  }
  return out;
}

inline std::vector<PairFeatures> FeaturesFor(const ModelConfig& config,
                                             const TrainingView& view,
                                             const BidSet& bids) {
  std::vector<PairFeatures> out;
  out.reserve(bids.size());
  for (const Bid& bid : bids) {
    out.push_back(FeaturesOf(config, view, bid.reviewer, bid.paper, bid.rating));
  }
  return out;
}

inline double Rmse(const ModelParams& params, const ModelConfig& config,
                   const TrainingView& view, const BidSet& eval) {
  if (eval.empty()) throw DataError("RMSE of an empty evaluation set");
  double sum = 0.0;
  for (const Bid& bid : eval) {
    const double err =
        bid.rating - Predict(params, config, view, bid.reviewer, bid.paper);
    sum += err * err;
  }
  return std::sqrt(sum / static_cast<double>(eval.size()));
}

// Regularized squared-error objective J over `bids` (see file comment).
inline double Objective(const ModelParams& params, const ModelConfig& config,
                        const std::vector<PairFeatures>& samples) {
  double total = 0.0;
  for (const PairFeatures& f : samples) {
    const std::size_t u = f.reviewer.index();
    const std::size_t i = f.paper.index();
    const double err = f.rating - PredictFromFeatures(params, config, f);
    total += err * err;
    total += config.lambda_reviewer_bias * params.reviewer_bias[u] *
             params.reviewer_bias[u];
    total += config.lambda_paper_bias * params.paper_bias[i] *
             params.paper_bias[i];
    if (config.terms.factors) {
      for (double v : params.reviewer_factors.row(u)) {
        total += config.lambda_factors * v * v;
      }
      for (double v : params.paper_factors.row(i)) {
        total += config.lambda_factors * v * v;
      }
    }
    if (config.terms.categories) {
      for (int k = 0; k < f.categories.count; ++k) {
        const double w = params.category_weights[f.categories.category[k].index()];
        total += config.lambda_category * w * w;
      }
    }
  }
  return total;
}

inline double Objective(const ModelParams& params, const ModelConfig& config,
                        const TrainingView& view, const BidSet& bids) {
  return Objective(params, config, FeaturesFor(config, view, bids));
}

namespace internal {

// Gradient of one sample's loss with respect to the parameters it touches.
struct SampleGradient {
  double reviewer_bias = 0.0;
  double paper_bias = 0.0;
  std::vector<double> reviewer_factors;
  std::vector<double> paper_factors;
  double category[2] = {0.0, 0.0};
  double gamma = 0.0;
  double phi = 0.0;
};

inline void ComputeSampleGradient(const ModelParams& params,
                                  const ModelConfig& config,
                                  const PairFeatures& f, SampleGradient* g) {
  const std::size_t u = f.reviewer.index();
  const std::size_t i = f.paper.index();
  const double err = f.rating - PredictFromFeatures(params, config, f);
  g->reviewer_bias =
      -2.0 * err + 2.0 * config.lambda_reviewer_bias * params.reviewer_bias[u];
  g->paper_bias =
      -2.0 * err + 2.0 * config.lambda_paper_bias * params.paper_bias[i];
  if (config.terms.factors) {
    const auto pu = params.reviewer_factors.row(u);
    const auto qi = params.paper_factors.row(i);
    const std::size_t dim = pu.size();
    g->reviewer_factors.resize(dim);
    g->paper_factors.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      g->reviewer_factors[k] =
          -2.0 * err * qi[k] + 2.0 * config.lambda_factors * pu[k];
      g->paper_factors[k] =
          -2.0 * err * pu[k] + 2.0 * config.lambda_factors * qi[k];
    }
  }
  if (config.terms.categories) {
    for (int k = 0; k < f.categories.count; ++k) {
      const double w =
          params.category_weights[f.categories.category[k].index()];
      g->category[k] = -2.0 * err * f.categories.value[k] +
                       2.0 * config.lambda_category * w;
    }
  }
  g->gamma = config.terms.paper_paper ? -2.0 * err * f.paper_paper : 0.0;
  g->phi =
      config.terms.reviewer_reviewer ? -2.0 * err * f.reviewer_reviewer : 0.0;
}

// params += scale * g for the touched entries.
inline void ApplySampleGradient(const ModelConfig& config,
                                const PairFeatures& f,
                                const SampleGradient& g, double scale,
                                ModelParams* params) {
  const std::size_t u = f.reviewer.index();
  const std::size_t i = f.paper.index();
  params->reviewer_bias[u] += scale * g.reviewer_bias;
  params->paper_bias[i] += scale * g.paper_bias;
  if (config.terms.factors) {
    auto pu = params->reviewer_factors.row(u);
    auto qi = params->paper_factors.row(i);
    for (std::size_t k = 0; k < pu.size(); ++k) {
      pu[k] += scale * g.reviewer_factors[k];
      qi[k] += scale * g.paper_factors[k];
    }
  }
  if (config.terms.categories) {
    for (int k = 0; k < f.categories.count; ++k) {
      params->category_weights[f.categories.category[k].index()] +=
          scale * g.category[k];
    }
  }
  if (config.terms.paper_paper) params->gamma += scale * g.gamma;
  if (config.terms.reviewer_reviewer) params->phi += scale * g.phi;
}

}  // namespace internal

// Full-batch gradient of Objective(), shaped like the parameters. The
// global mean is fixed, so its slot is always 0.
inline ModelParams Gradient(const ModelParams& params,
                            const ModelConfig& config,
                            const std::vector<PairFeatures>& samples) {
  ModelParams grad =
      ModelParams::Zero(params.num_reviewers(), params.num_papers(),
                        params.num_factors(), params.category_weights.size());
  internal::SampleGradient g;
  for (const PairFeatures& f : samples) {
    internal::ComputeSampleGradient(params, config, f, &g);
    internal::ApplySampleGradient(config, f, g, 1.0, &grad);
  }
  return grad;
}

inline ModelParams Gradient(const ModelParams& params,
                            const ModelConfig& config,
                            const TrainingView& view, const BidSet& bids) {
  return Gradient(params, config, FeaturesFor(config, view, bids));
}

inline ModelParams InitialParams(const Dataset& data, const BidSet& train,
                                 const ModelConfig& config) {
  ModelParams params =
      ModelParams::Zero(data.num_reviewers(), data.num_papers(),
                        static_cast<std::size_t>(config.factors),
                        data.num_categories());
  params.mu = GlobalMean(train);
  if (config.terms.factors) {
    Rng rng(config.seed);
    std::uniform_real_distribution<double> init(-config.init_scale,
                                                config.init_scale);
    for (double& v : params.reviewer_factors.data()) v = init(rng);
    for (double& v : params.paper_factors.data()) v = init(rng);
  }
  if (config.terms.paper_paper) params.gamma = config.init_gamma;
  if (config.terms.reviewer_reviewer) params.phi = config.init_phi;
  return params;
}

struct TrainingLog {
  std::vector<double> objective;   // after each epoch; [0] is the start
  std::vector<double> train_rmse;  // same indexing
};

// Stochastic gradient descent over the train bids, visited in a freshly
// shuffled order each epoch. Deterministic for a fixed config.seed. Each
// step moves by -learning_rate/2 times the sample gradient, so biases move
// by lr * (e - lambda * b). Category weights are projected onto w >= 0.
inline ModelParams Train(const Dataset& data, const TrainingView& view,
                         const BidSet& train, const ModelConfig& config,
                         TrainingLog* log = nullptr) {
  config.Validate();
  if (train.empty()) throw DataError("cannot train on an empty bid set");
  ValidateBids(train, data.num_reviewers(), data.num_papers());

  ModelParams params = InitialParams(data, train, config);
  const std::vector<PairFeatures> samples = FeaturesFor(config, view, train);

  auto record = [&] {
    if (log == nullptr) return;
    const double obj = Objective(params, config, samples);
    double sq = 0.0;
    for (const PairFeatures& f : samples) {
      const double err = f.rating - PredictFromFeatures(params, config, f);
      sq += err * err;
    }
    log->objective.push_back(obj);
    log->train_rmse.push_back(std::sqrt(sq / samples.size()));
  };
  record();

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(DeriveSeed(config.seed, 1));
  internal::SampleGradient g;
  double rate = config.learning_rate;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t idx : order) {
      const PairFeatures& f = samples[idx];
      internal::ComputeSampleGradient(params, config, f, &g);
      internal::ApplySampleGradient(config, f, g, -0.5 * rate, &params);
      if (config.terms.categories) {
        for (int k = 0; k < f.categories.count; ++k) {
          double& w = params.category_weights[f.categories.category[k].index()];
          w = std::max(w, 0.0);
        }
      }
    }
    if (!params.AllFinite()) {
      throw NumericalError("training diverged at epoch " +
                           std::to_string(epoch) +
                           " (non-finite parameter); lower the learning rate");
    }
    record();
    rate *= config.learning_rate_decay;
  }
  return params;
}

inline ModelParams Train(const Dataset& data, const BidSet& train,
                         const PaperSimilarity& sims,
                         const ModelConfig& config,
                         TrainingLog* log = nullptr) {
  const TrainingView view(data, train, sims);
  return Train(data, view, train, config, log);
}

// Checkpoint: a line-oriented text file holding the config and every
// parameter as a hexadecimal float, so it round-trips bit-exactly.
inline constexpr char kCheckpointMagic[] = "revmatch-checkpoint 1";

struct Checkpoint {
  ModelConfig config;
  ModelParams params;

  bool operator==(const Checkpoint&) const = default;
};

namespace internal {

inline void WriteVector(std::ostream& out, const std::string& key,
                        std::span<const double> values) {
  out << key << " =";
  for (double v : values) out << ' ' << FormatHexDouble(v);
  out << '\n';
}

}  // namespace internal

inline void WriteCheckpoint(std::ostream& out, const Checkpoint& ckpt) {
  const ModelParams& p = ckpt.params;
  out << kCheckpointMagic << '\n';
  for (const auto& [key, value] : ckpt.config.ToKeyValues()) {
    out << "config." << key << " = " << value << '\n';
  }
  out << "reviewers = " << p.num_reviewers() << '\n';
  out << "papers = " << p.num_papers() << '\n';
  out << "factors_stored = " << p.num_factors() << '\n';
  out << "categories = " << p.category_weights.size() << '\n';
  out << "mu = " << FormatHexDouble(p.mu) << '\n';
  out << "gamma = " << FormatHexDouble(p.gamma) << '\n';
  out << "phi = " << FormatHexDouble(p.phi) << '\n';
  internal::WriteVector(out, "reviewer_bias", p.reviewer_bias);
  internal::WriteVector(out, "paper_bias", p.paper_bias);
  internal::WriteVector(out, "category_weights", p.category_weights);
  for (std::size_t u = 0; u < p.num_reviewers(); ++u) {
    internal::WriteVector(out, "p." + std::to_string(u),
                          p.reviewer_factors.row(u));
  }
  for (std::size_t i = 0; i < p.num_papers(); ++i) {
    internal::WriteVector(out, "q." + std::to_string(i), p.paper_factors.row(i));
  }
}

inline void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  auto out = OpenOutput(path);
  WriteCheckpoint(out, ckpt);
  if (!out) throw DataError("failed writing " + path);
}

inline Checkpoint ReadCheckpoint(std::istream& in, const std::string& source) {
  auto fail = [&source](int line, const std::string& msg) -> DataError {
    return DataError(source + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != kCheckpointMagic) {
    throw fail(1, "not a revmatch checkpoint");
  }
  Checkpoint ckpt;
  long long m = -1, n = -1, f = -1, k = -1;
  std::vector<bool> seen_p, seen_q;
  auto parse_values = [&](const std::string& text) {
    std::vector<double> values;
    std::istringstream ss(text);
    std::string token;
    while (ss >> token) {
      double v = 0.0;
      if (!ParseDouble(token, &v)) throw fail(line_no, "bad number " + token);
      values.push_back(v);
    }
    return values;
  };
  auto ensure_shape = [&] {
    if (m < 0 || n < 0 || f < 0 || k < 0) {
      throw fail(line_no, "dimensions must precede parameter rows");
    }
    if (ckpt.params.num_reviewers() == 0 && ckpt.params.num_papers() == 0) {
      const double mu = ckpt.params.mu;
      const double gamma = ckpt.params.gamma;
      const double phi = ckpt.params.phi;
      ckpt.params = ModelParams::Zero(m, n, f, k);
      ckpt.params.mu = mu;
      ckpt.params.gamma = gamma;
      ckpt.params.phi = phi;
      seen_p.assign(m, false);
      seen_q.assign(n, false);
    }
  };
  auto expect_size = [&](const std::vector<double>& values, long long want) {
    if (static_cast<long long>(values.size()) != want) {
      throw fail(line_no, "expected " + std::to_string(want) + " values");
    }
  };
  bool have_mu = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    std::string key, value;
    if (eq == std::string::npos) {
      if (line.size() >= 2 && line.substr(line.size() - 2) == " =") {
        key = line.substr(0, line.size() - 2);
      } else {
        throw fail(line_no, "expected 'key = value'");
      }
    } else {
      key = line.substr(0, eq);
      value = line.substr(eq + 3);
    }
    auto single = [&]() {
      double v = 0.0;
      if (!ParseDouble(value, &v)) throw fail(line_no, "bad number " + value);
      return v;
    };
    auto count = [&]() {
      long long v = 0;
      if (!ParseInt(value, &v) || v < 0) throw fail(line_no, "bad count");
      return v;
    };
    if (key.rfind("config.", 0) == 0) {
      if (!ckpt.config.Set(key.substr(7), value)) {
        throw fail(line_no, "unknown config key " + key);
      }
    } else if (key == "reviewers") {
      m = count();
    } else if (key == "papers") {
      n = count();
    } else if (key == "factors_stored") {
      f = count();
    } else if (key == "categories") {
      k = count();
    } else if (key == "mu") {
      ckpt.params.mu = single();
      have_mu = true;
    } else if (key == "gamma") {
      ckpt.params.gamma = single();
    } else if (key == "phi") {
      ckpt.params.phi = single();
    } else if (key == "reviewer_bias") {
      ensure_shape();
      auto values = parse_values(value);
      expect_size(values, m);
      ckpt.params.reviewer_bias = std::move(values);
    } else if (key == "paper_bias") {
      ensure_shape();
      auto values = parse_values(value);
      expect_size(values, n);
      ckpt.params.paper_bias = std::move(values);
    } else if (key == "category_weights") {
      ensure_shape();
      auto values = parse_values(value);
      expect_size(values, k);
      ckpt.params.category_weights = std::move(values);
    } else if (key.rfind("p.", 0) == 0 || key.rfind("q.", 0) == 0) {
      ensure_shape();
      long long row = -1;
      const bool is_p = key[0] == 'p';
      if (!ParseInt(key.substr(2), &row) || row < 0 || row >= (is_p ? m : n)) {
        throw fail(line_no, "bad factor row " + key);
      }
      auto values = parse_values(value);
      expect_size(values, f);
      auto dst = is_p ? ckpt.params.reviewer_factors.row(row)
                      : ckpt.params.paper_factors.row(row);
      std::copy(values.begin(), values.end(), dst.begin());
      (is_p ? seen_p : seen_q)[row] = true;
    } else {
      throw fail(line_no, "unknown key " + key);
    }
  }
  if (!have_mu || m < 0) throw fail(line_no, "truncated checkpoint");
  ensure_shape();
  if (std::count(seen_p.begin(), seen_p.end(), false) != 0 ||
      std::count(seen_q.begin(), seen_q.end(), false) != 0) {
    throw fail(line_no, "missing factor rows");
  }
  return ckpt;
}

inline Checkpoint LoadCheckpoint(const std::string& path) {
  auto in = OpenInput(path);
  return ReadCheckpoint(in, path);
}

// Writes `reviewer,paper,predicted` rows. Exported values are clamped to
// the 1..4 rating scale.
inline void WritePredictions(const std::string& path, const Dataset& data,
                             const ModelParams& params,
                             const ModelConfig& config,
                             const TrainingView& view,
                             const std::vector<std::pair<ReviewerId, PaperId>>&
                                 pairs) {
  auto out = OpenOutput(path);
  WriteCsvRow(out, {"reviewer", "paper", "predicted"});
  for (const auto& [u, i] : pairs) {
    const double value =
        std::clamp(Predict(params, config, view, u, i), 1.0, 4.0);
    WriteCsvRow(out, {data.reviewers.Name(u), data.papers.Name(i),
                      FormatDouble(value)});
  }
}

}  // namespace revmatch

#endif  // REVMATCH_MODEL_H_
