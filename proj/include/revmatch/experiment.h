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

#ifndef REVMATCH_EXPERIMENT_H_
#define REVMATCH_EXPERIMENT_H_

// Repeated random train/test protocols:
//  * RMSE experiment: every model variant is trained on the train side of
//    each split and scored on its test side.
//  * Assignment experiment: a share of the bids is hidden, the full model
//    fills in the rest of the matrix, each strategy builds an affinity
//    matrix from the visible bids, the assignment is solved, and the chosen
//    pairs are scored against the hidden bids and the subject categories.
// All strategies and variants share the same splits within an iteration.
// Iteration k uses seeds derived from (master_seed, k), so results do not
// depend on the number of worker threads.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "revmatch/assign.h"
#include "revmatch/csv.h"
#include "revmatch/dataset.h"
#include "revmatch/eval.h"
#include "revmatch/model.h"
#include "revmatch/parallel.h"
#include "revmatch/random.h"
#include "revmatch/textsim.h"

namespace revmatch {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation (0 for one value)
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  double standard_error() const {
    return count == 0 ? 0.0 : sd / std::sqrt(static_cast<double>(count));
  }
};

inline Summary Summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = values.front();
  s.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / values.size();
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(sq / (values.size() - 1));
  }
  // Keep the mean inside [min, max] despite rounding.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

inline std::uint64_t SplitSeed(std::uint64_t master, std::size_t iteration) {
  return DeriveSeed(master, 2 * iteration);
}
inline std::uint64_t ModelSeed(std::uint64_t master, std::size_t iteration) {
  return DeriveSeed(master, 2 * iteration + 1);
}

struct RmseExperimentOptions {
  int iterations = 100;
  double test_fraction = 0.1;
  std::uint64_t master_seed = 1;
  std::vector<int> variants = {1, 2, 3, 4, 5, 6, 7, 8};
  int jobs = 1;
};

struct VariantResult {
  int variant = 0;
  std::vector<double> rmse;  // per iteration
  Summary summary;

  std::string name() const { return "v" + std::to_string(variant); }
};

struct RmseReport {
  std::vector<VariantResult> variants;

  const VariantResult& Variant(int v) const {
    for (const auto& r : variants) {
      if (r.variant == v) return r;
    }
    throw UsageError("variant " + std::to_string(v) + " not in report");
  }
};

inline RmseReport RunRmseExperiment(const Dataset& data,
                                    const PaperSimilarity& sims,
                                    const ModelConfig& base,
                                    const RmseExperimentOptions& options) {
  if (options.iterations < 1) throw UsageError("iterations must be >= 1");
  base.Validate();
  for (int v : options.variants) TermsForVariant(v);
  const std::size_t iters = options.iterations;
  const std::size_t nv = options.variants.size();
  std::vector<std::vector<double>> rmse(nv, std::vector<double>(iters));
  ParallelFor(iters, options.jobs, [&](std::size_t it) {
    const Split split = MakeSplit(data.bids, options.test_fraction,
                                  SplitSeed(options.master_seed, it));
    const TrainingView view(data, split.train, sims);
    for (std::size_t k = 0; k < nv; ++k) {
      ModelConfig config = base;
      config.terms = TermsForVariant(options.variants[k]);
      config.seed = ModelSeed(options.master_seed, it);
      const ModelParams params = Train(data, view, split.train, config);
      rmse[k][it] = Rmse(params, config, view, split.test);
    }
  });
  RmseReport report;
  for (std::size_t k = 0; k < nv; ++k) {
    VariantResult r;
    r.variant = options.variants[k];
    r.rmse = std::move(rmse[k]);
    r.summary = Summarize(r.rmse);
    report.variants.push_back(std::move(r));
  }
  return report;
}

struct AssignmentExperimentOptions {
  int iterations = 20;
  double test_fraction = 0.5;
  std::uint64_t master_seed = 1;
  std::vector<Strategy> strategies = {Strategy::kBaseline, Strategy::kResid,
                                      Strategy::kNorm};
  Capacities capacities;
  bool block_conflicts = false;
  int jobs = 1;
};

struct StrategyOutcome {
  double objective = 0.0;   // on the strategy's own affinity matrix
  double rating_sum = 0.0;  // on the baseline matrix (visible bids, 2.5)
  int topical_total = 0;
  QualityHistogram histogram;
};

struct StrategyResult {
  Strategy strategy = Strategy::kBaseline;
  std::vector<StrategyOutcome> iterations;
  // Per-seed (strategy - baseline) / |baseline| * 100, when a baseline run
  // exists and its value is non-zero.
  std::vector<double> topical_improvement_pct;
  std::vector<double> rating_sum_improvement_pct;

  // Bucket fraction pooled per iteration, then averaged.
  double MeanFraction(int rating) const {
    std::vector<double> values;
    for (const auto& o : iterations) {
      values.push_back(o.histogram.Fraction(rating));
    }
    return Summarize(values).mean;
  }
};

struct AssignmentReport {
  std::vector<StrategyResult> strategies;

  const StrategyResult& Of(Strategy s) const {
    for (const auto& r : strategies) {
      if (r.strategy == s) return r;
    }
    throw UsageError("strategy " + ToString(s) + " not in report");
  }
};

inline AssignmentReport RunAssignmentExperiment(
    const Dataset& data, const PaperSimilarity& sims, const ModelConfig& base,
    const AssignmentExperimentOptions& options) {
  if (options.iterations < 1) throw UsageError("iterations must be >= 1");
  if (options.strategies.empty()) throw UsageError("no strategies requested");
  base.Validate();
  const std::size_t iters = options.iterations;
  const std::size_t ns = options.strategies.size();
  const bool need_model =
      std::any_of(options.strategies.begin(), options.strategies.end(),
                  [](Strategy s) { return s != Strategy::kBaseline; });
  std::optional<DenseMatrix<std::uint8_t>> mask;
  if (options.block_conflicts) mask = PrimaryConflictMask(data);
  SolverOptions solver;
  solver.forbidden = mask ? &*mask : nullptr;

  std::vector<std::vector<StrategyOutcome>> outcomes(
      ns, std::vector<StrategyOutcome>(iters));
  ParallelFor(iters, options.jobs, [&](std::size_t it) {
    const Split split = MakeSplit(data.bids, options.test_fraction,
                                  SplitSeed(options.master_seed, it));
    AffinityMatrix predicted(data.num_reviewers(), data.num_papers(), 0.0);
    if (need_model) {
      const TrainingView view(data, split.train, sims);
      ModelConfig config = base;
      config.seed = ModelSeed(options.master_seed, it);
      const ModelParams params = Train(data, view, split.train, config);
      predicted = PredictAll(params, config, view);
    }
    const AffinityMatrix visible =
        BuildAffinity(split.train, predicted, Strategy::kBaseline);
    for (std::size_t k = 0; k < ns; ++k) {
      const AffinityMatrix affinity =
          BuildAffinity(split.train, predicted, options.strategies[k]);
      const SolveResult solved =
          SolveAssignment(affinity, options.capacities, solver);
      StrategyOutcome& o = outcomes[k][it];
      o.objective = solved.objective;
      o.rating_sum = AssignmentObjective(visible, solved.assignment);
      o.topical_total =
          TopicalRelevance(solved.assignment, data.annotations).total;
      o.histogram = QualityOf(solved.assignment, split.test);
    }
  });

  AssignmentReport report;
  std::optional<std::size_t> baseline_index;
  for (std::size_t k = 0; k < ns; ++k) {
    if (options.strategies[k] == Strategy::kBaseline) baseline_index = k;
  }
  for (std::size_t k = 0; k < ns; ++k) {
    StrategyResult r;
    r.strategy = options.strategies[k];
    r.iterations = std::move(outcomes[k]);
    report.strategies.push_back(std::move(r));
  }
  if (baseline_index) {
    const auto& base_runs = report.strategies[*baseline_index].iterations;
    for (auto& r : report.strategies) {
      for (std::size_t it = 0; it < iters; ++it) {
        const double bt = base_runs[it].topical_total;
        const double br = base_runs[it].rating_sum;
        if (bt != 0.0) {
          r.topical_improvement_pct.push_back(
              100.0 * (r.iterations[it].topical_total - bt) / std::fabs(bt));
        }
        if (br != 0.0) {
          r.rating_sum_improvement_pct.push_back(
              100.0 * (r.iterations[it].rating_sum - br) / std::fabs(br));
        }
      }
    }
  }
  return report;
}

struct ExperimentReport {
  std::optional<RmseReport> rmse;
  std::optional<AssignmentReport> assignment;
};

namespace internal {

struct MetricRow {
  std::string iteration;
  std::string strategy;
  std::string metric;
  double value;
};

inline std::vector<std::pair<std::string, double>> OutcomeMetrics(
    const StrategyOutcome& o) {
  const QualityHistogram& h = o.histogram;
  return {{"objective", o.objective},
          {"rating_sum", o.rating_sum},
          {"topical_total", static_cast<double>(o.topical_total)},
          {"high", static_cast<double>(h.high())},
          {"ok", static_cast<double>(h.ok())},
          {"low", static_cast<double>(h.low())},
          {"no", static_cast<double>(h.no())},
          {"unknown", static_cast<double>(h.unknown)},
          {"high_fraction", h.Fraction(kHigh)},
          {"ok_fraction", h.Fraction(kOk)},
          {"low_fraction", h.Fraction(kLow)},
          {"no_fraction", h.Fraction(kNo)}};
}

inline std::vector<MetricRow> ReportRows(const ExperimentReport& report) {
  std::vector<MetricRow> rows;
  if (report.rmse) {
    for (const auto& v : report.rmse->variants) {
      for (std::size_t it = 0; it < v.rmse.size(); ++it) {
        rows.push_back({std::to_string(it), v.name(), "rmse", v.rmse[it]});
      }
    }
    for (const auto& v : report.rmse->variants) {
      rows.push_back({"mean", v.name(), "rmse", v.summary.mean});
      rows.push_back({"sd", v.name(), "rmse", v.summary.sd});
    }
  }
  if (report.assignment) {
    for (const auto& s : report.assignment->strategies) {
      for (std::size_t it = 0; it < s.iterations.size(); ++it) {
        for (const auto& [name, value] : OutcomeMetrics(s.iterations[it])) {
          rows.push_back({std::to_string(it), ToString(s.strategy), name, value});
        }
      }
    }
    for (const auto& s : report.assignment->strategies) {
      std::map<std::string, std::vector<double>> columns;
      std::vector<std::string> order;
      for (const auto& o : s.iterations) {
        for (const auto& [name, value] : OutcomeMetrics(o)) {
          if (!columns.count(name)) order.push_back(name);
          columns[name].push_back(value);
        }
      }
      for (const auto& name : order) {
        rows.push_back({"mean", ToString(s.strategy), name,
                        Summarize(columns[name]).mean});
      }
      if (!s.topical_improvement_pct.empty()) {
        rows.push_back({"mean", ToString(s.strategy),
                        "topical_improvement_pct",
                        Summarize(s.topical_improvement_pct).mean});
      }
      if (!s.rating_sum_improvement_pct.empty()) {
        rows.push_back({"mean", ToString(s.strategy),
                        "rating_sum_improvement_pct",
                        Summarize(s.rating_sum_improvement_pct).mean});
      }
    }
  }
  return rows;
}

}  // namespace internal

// Long format: iteration,strategy,metric,value. Aggregate rows use the
// iteration labels "mean" and "sd".
inline void WriteReportCsv(const std::string& path,
                           const ExperimentReport& report) {
  auto out = OpenOutput(path);
  WriteCsvRow(out, {"iteration", "strategy", "metric", "value"});
  for (const auto& row : internal::ReportRows(report)) {
    WriteCsvRow(out, {row.iteration, row.strategy, row.metric,
                      FormatDouble(row.value)});
  }
}

inline nlohmann::ordered_json ReportJson(
    const ExperimentReport& report,
    const std::vector<std::pair<std::string, std::string>>& config_echo) {
  nlohmann::ordered_json root;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config_echo) config[key] = value;
  root["config"] = config;
  if (report.rmse) {
    nlohmann::ordered_json variants = nlohmann::ordered_json::array();
    for (const auto& v : report.rmse->variants) {
      variants.push_back({{"variant", v.name()},
                          {"rmse", v.rmse},
                          {"mean", v.summary.mean},
                          {"sd", v.summary.sd},
                          {"standard_error", v.summary.standard_error()}});
    }
    root["rmse"] = variants;
  }
  if (report.assignment) {
    nlohmann::ordered_json strategies = nlohmann::ordered_json::array();
    for (const auto& s : report.assignment->strategies) {
      nlohmann::ordered_json iterations = nlohmann::ordered_json::array();
      std::map<std::string, std::vector<double>> columns;
      std::vector<std::string> order;
      for (const auto& o : s.iterations) {
        nlohmann::ordered_json entry;
        for (const auto& [name, value] : internal::OutcomeMetrics(o)) {
          entry[name] = value;
          if (!columns.count(name)) order.push_back(name);
          columns[name].push_back(value);
        }
        iterations.push_back(entry);
      }
      nlohmann::ordered_json mean;
      for (const auto& name : order) mean[name] = Summarize(columns[name]).mean;
      if (!s.topical_improvement_pct.empty()) {
        mean["topical_improvement_pct"] =
            Summarize(s.topical_improvement_pct).mean;
      }
      if (!s.rating_sum_improvement_pct.empty()) {
        mean["rating_sum_improvement_pct"] =
            Summarize(s.rating_sum_improvement_pct).mean;
      }
      strategies.push_back({{"strategy", ToString(s.strategy)},
                            {"iterations", iterations},
                            {"mean", mean}});
    }
    root["assignment"] = strategies;
  }
  return root;
}

inline void WriteReportJson(
    const std::string& path, const ExperimentReport& report,
    const std::vector<std::pair<std::string, std::string>>& config_echo) {
  auto out = OpenOutput(path);
  out << ReportJson(report, config_echo).dump(2) << '\n';
}

}  // namespace revmatch

#endif  // REVMATCH_EXPERIMENT_H_
