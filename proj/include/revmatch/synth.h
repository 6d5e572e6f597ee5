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

#ifndef REVMATCH_SYNTH_H_
#define REVMATCH_SYNTH_H_

// Synthetic bidding data with planted structure. A latent score
//
//   2.5 + b_u + b_i + p_u.q_i + sum_c sigma_ic theta_uc w_c
//       + taste_u[topic(i)] + community_taste[group(u)][i] + noise
//
// is rounded and clipped to the 1..4 scale for a random subset of pairs.
// Papers get abstracts drawn mostly from a topic-specific vocabulary, so
// abstract similarity reveals the topic; reviewers in the same community
// co-author, so co-authorship reveals shared taste. Each component can be
// switched off.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "revmatch/dataset.h"
#include "revmatch/error.h"
#include "revmatch/random.h"

namespace revmatch {

struct SynthConfig {
  int reviewers = 80;
  int papers = 160;
  int categories = 12;
  int topics = 8;
  int communities = 10;
  int latent_dim = 3;
  double density = 0.15;

  bool bias = true;
  bool factor = true;
  bool category = true;
  bool similarity = true;
  bool coauthor = true;

  double reviewer_bias_sd = 0.5;
  double paper_bias_sd = 0.3;
  double factor_sd = 0.45;          // per latent coordinate
  double category_weight_max = 1.2;  // planted w_c ~ U[0, max]
  double topic_taste_sd = 0.9;
  double community_taste_sd = 0.7;
  double noise_sd = 0.35;

  int abstract_words = 60;
  int topic_vocabulary = 40;
  int common_vocabulary = 300;
  double topic_word_share = 0.6;

  std::uint64_t seed = 1;

  // Presets: "bias", "factor", "category", "similarity", "full".
  static SynthConfig ForKind(const std::string& kind) {
    SynthConfig c;
    c.bias = true;
    c.factor = c.category = c.similarity = c.coauthor = false;
    if (kind == "factor") {
      c.factor = true;
    } else if (kind == "category") {
      c.category = true;
    } else if (kind == "similarity") {
      c.similarity = true;
    } else if (kind == "full") {
      c.factor = c.category = c.similarity = c.coauthor = true;
    } else if (kind != "bias") {
      throw UsageError("synthetic kind must be bias, factor, category, "
                       "similarity or full; got '" + kind + "'");
    }
    return c;
  }
};

// Ground truth kept alongside the generated data, for recovery tests.
struct SynthTruth {
  std::vector<double> reviewer_bias;
  std::vector<double> paper_bias;
  std::vector<double> category_weights;
  std::vector<int> paper_topic;
  std::vector<int> reviewer_community;
  std::vector<double> score;  // m x n latent scores before noise, row-major
};

inline Dataset GenerateSynthetic(const SynthConfig& cfg,
                                 SynthTruth* truth = nullptr) {
  if (cfg.reviewers < 2 || cfg.papers < 2 || cfg.categories < 2 ||
      cfg.topics < 1 || cfg.communities < 1 || cfg.latent_dim < 1) {
    throw UsageError("synthetic dataset needs >= 2 reviewers, papers and "
                     "categories");
  }
  if (!(cfg.density > 0.0 && cfg.density <= 1.0)) {
    throw UsageError("density must lie in (0, 1]");
  }
  const int m = cfg.reviewers;
  const int n = cfg.papers;
  const int k = cfg.categories;
  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  Dataset data;
  auto pad = [](int v, int width) {
    std::string s = std::to_string(v);
    return std::string(std::max(0, width - static_cast<int>(s.size())), '0') +
           s;
  };
  for (int u = 0; u < m; ++u) data.reviewers.Intern("r" + pad(u, 4));
  for (int i = 0; i < n; ++i) data.papers.Intern("p" + pad(i, 4));
  for (int c = 0; c < k; ++c) data.categories.Intern("cat" + pad(c, 2));

  // Planted parameters.
  std::vector<double> bu(m, 0.0), bi(n, 0.0);
  if (cfg.bias) {
    for (double& v : bu) v = cfg.reviewer_bias_sd * normal(rng);
    for (double& v : bi) v = cfg.paper_bias_sd * normal(rng);
  }
  std::vector<double> pu(static_cast<std::size_t>(m) * cfg.latent_dim),
      qi(static_cast<std::size_t>(n) * cfg.latent_dim);
  for (double& v : pu) v = cfg.factor_sd * normal(rng);
  for (double& v : qi) v = cfg.factor_sd * normal(rng);
  std::vector<double> weights(k);
  for (double& w : weights) w = uniform(0.0, cfg.category_weight_max);

  std::vector<int> topic(n), community(m);
  for (int& t : topic) t = uniform_int(0, cfg.topics - 1);
  for (int& g : community) g = uniform_int(0, cfg.communities - 1);
  std::vector<double> taste(static_cast<std::size_t>(m) * cfg.topics);
  for (double& v : taste) v = cfg.topic_taste_sd * normal(rng);
  std::vector<double> group_taste(static_cast<std::size_t>(cfg.communities) *
                                  n);
  for (double& v : group_taste) v = cfg.community_taste_sd * normal(rng);

  // Categories.
  data.annotations.primary.resize(n);
  data.annotations.secondary.resize(n);
  for (int i = 0; i < n; ++i) {
    const int primary = uniform_int(0, k - 1);
    int secondary = uniform_int(0, k - 2);
    if (secondary >= primary) ++secondary;
    data.annotations.primary[i] = CategoryId(primary);
    data.annotations.secondary[i] = CategoryId(secondary);
  }
  data.annotations.interest.assign(m, {});
  data.annotations.conflict.assign(m, {});
  for (int u = 0; u < m; ++u) {
    std::vector<int> cats(k);
    std::iota(cats.begin(), cats.end(), 0);
    std::shuffle(cats.begin(), cats.end(), rng);
    const int interests = uniform_int(2, std::min(4, k - 1));
    const int conflicts = uniform_int(0, 1);
    for (int c = 0; c < interests; ++c) {
      data.annotations.interest[u].push_back(CategoryId(cats[c]));
    }
    for (int c = interests; c < interests + conflicts && c < k; ++c) {
      data.annotations.conflict[u].push_back(CategoryId(cats[c]));
    }
    std::sort(data.annotations.interest[u].begin(),
              data.annotations.interest[u].end());
    std::sort(data.annotations.conflict[u].begin(),
              data.annotations.conflict[u].end());
  }

  auto category_effect = [&](int u, int i) {
    double sum = 0.0;
    const CategoryId cats[2] = {data.annotations.primary[i],
                                data.annotations.secondary[i]};
    const double sigma[2] = {1.0, 0.5};
    for (int s = 0; s < 2; ++s) {
      double theta = 0.0;
      switch (data.annotations.RelationOf(ReviewerId(u), cats[s])) {
        case Relation::kInterest: theta = 1.0; break;
        case Relation::kConflict: theta = -0.5; break;
        case Relation::kNone: break;
      }
      sum += sigma[s] * theta * weights[cats[s].index()];
    }
    return sum;
  };

  // Abstracts.
  data.corpus.abstracts.resize(n);
  for (int i = 0; i < n; ++i) {
    std::string text;
    for (int w = 0; w < cfg.abstract_words; ++w) {
      if (!text.empty()) text.push_back(' ');
      if (uniform(0.0, 1.0) < cfg.topic_word_share) {
        text += "topic" + std::to_string(topic[i]) + "w" +
                std::to_string(uniform_int(0, cfg.topic_vocabulary - 1));
      } else {
        text += "word" +
                std::to_string(uniform_int(0, cfg.common_vocabulary - 1));
      }
    }
    data.corpus.abstracts[i] = std::move(text);
  }

  // Co-authorship: frequent inside a community, rare across.
  data.coauthors.Resize(m);
  if (cfg.coauthor) {
    for (int u = 0; u < m; ++u) {
      for (int v = u + 1; v < m; ++v) {
        const bool same = community[u] == community[v];
        if (uniform(0.0, 1.0) < (same ? 0.7 : 0.01)) {
          data.coauthors.Add(ReviewerId(u), ReviewerId(v), uniform_int(1, 5));
        }
      }
    }
  }

  // Scores and bids.
  std::vector<double> score(static_cast<std::size_t>(m) * n);
  for (int u = 0; u < m; ++u) {
    for (int i = 0; i < n; ++i) {
      double s = 2.5 + bu[u] + bi[i];
      if (cfg.factor) {
        for (int d = 0; d < cfg.latent_dim; ++d) {
          s += pu[u * cfg.latent_dim + d] * qi[i * cfg.latent_dim + d];
        }
      }
      if (cfg.category) s += category_effect(u, i);
      if (cfg.similarity) s += taste[u * cfg.topics + topic[i]];
      if (cfg.coauthor) s += group_taste[community[u] * n + i];
      score[static_cast<std::size_t>(u) * n + i] = s;
    }
  }
  const int per_reviewer =
      std::max(1, static_cast<int>(std::lround(cfg.density * n)));
  std::vector<int> papers(n);
  std::iota(papers.begin(), papers.end(), 0);
  for (int u = 0; u < m; ++u) {
    std::shuffle(papers.begin(), papers.end(), rng);
    std::vector<int> chosen(papers.begin(), papers.begin() + per_reviewer);
    std::sort(chosen.begin(), chosen.end());
    for (int i : chosen) {
      const double noisy =
          score[static_cast<std::size_t>(u) * n + i] + cfg.noise_sd * normal(rng);
      const int rating =
          static_cast<int>(std::clamp(std::lround(noisy), 1L, 4L));
      data.bids.push_back({ReviewerId(u), PaperId(i), rating});
    }
  }

  if (truth != nullptr) {
    truth->reviewer_bias = bu;
    truth->paper_bias = bi;
    truth->category_weights = weights;
    truth->paper_topic = topic;
    truth->reviewer_community = community;
    truth->score = std::move(score);
  }
  return data;
}

}  // namespace revmatch

#endif  // REVMATCH_SYNTH_H_
