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

#ifndef REVMATCH_CONFIG_H_
#define REVMATCH_CONFIG_H_

// Flat `key = value` run configuration shared by the CLI subcommands.
// Lines starting with '#' are comments. Unknown keys are errors.

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "revmatch/assign.h"
#include "revmatch/csv.h"
#include "revmatch/error.h"
#include "revmatch/model.h"
#include "revmatch/textsim.h"

namespace revmatch {

inline std::string StrategiesToString(const std::vector<Strategy>& list) {
  std::string out;
  for (Strategy s : list) {
    if (!out.empty()) out.push_back(',');
    out += ToString(s);
  }
  return out;
}

inline std::vector<Strategy> ParseStrategies(const std::string& text) {
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseStrategy(item));
  if (out.empty()) throw UsageError("empty strategy list");
  return out;
}

struct RunConfig {
  std::string data_dir = "data";
  std::string out_dir = "out";
  std::string checkpoint;  // empty: <out>/model.ckpt
  std::uint64_t seed = 1;  // master seed for splits and experiments
  double test_fraction = 0.1;
  int iterations = 100;
  std::string mode = "both";  // experiment: rmse | assign | both
  double assign_test_fraction = 0.5;
  int assign_iterations = 20;
  Strategy strategy = Strategy::kResid;
  std::vector<Strategy> strategies = {Strategy::kBaseline, Strategy::kResid,
                                      Strategy::kNorm};
  Capacities capacities;
  bool block_conflicts = false;
  int jobs = 1;
  SimilarityConfig similarity;
  ModelConfig model;

  bool operator==(const RunConfig& o) const {
    return data_dir == o.data_dir && out_dir == o.out_dir &&
           checkpoint == o.checkpoint && seed == o.seed &&
           test_fraction == o.test_fraction && iterations == o.iterations &&
           mode == o.mode && assign_test_fraction == o.assign_test_fraction &&
           assign_iterations == o.assign_iterations && strategy == o.strategy &&
           strategies == o.strategies && capacities == o.capacities &&
           block_conflicts == o.block_conflicts && jobs == o.jobs &&
           similarity.exponent == o.similarity.exponent &&
           similarity.idf == o.similarity.idf &&
           similarity.threshold == o.similarity.threshold && model == o.model;
  }

  std::string CheckpointPath() const {
    return checkpoint.empty() ? out_dir + "/model.ckpt" : checkpoint;
  }

  std::vector<std::pair<std::string, std::string>> ToKeyValues() const {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"data", data_dir},
        {"out", out_dir},
        {"checkpoint", checkpoint},
        {"seed", std::to_string(seed)},
        {"test_fraction", FormatDouble(test_fraction)},
        {"iterations", std::to_string(iterations)},
        {"mode", mode},
        {"assign_test_fraction", FormatDouble(assign_test_fraction)},
        {"assign_iterations", std::to_string(assign_iterations)},
        {"strategy", ToString(strategy)},
        {"strategies", StrategiesToString(strategies)},
        {"cp", std::to_string(capacities.per_paper)},
        {"cr", std::to_string(capacities.per_reviewer)},
        {"relaxed_paper_coverage",
         capacities.relaxed_paper_coverage ? "true" : "false"},
        {"block_conflicts", block_conflicts ? "true" : "false"},
        {"jobs", std::to_string(jobs)},
        {"sim_exponent", FormatDouble(similarity.exponent)},
        {"sim_idf", similarity.idf ? "true" : "false"},
        {"sim_threshold", FormatDouble(similarity.threshold)},
    };
    for (auto& entry : model.ToKeyValues()) kv.push_back(std::move(entry));
    return kv;
  }

  void Set(const std::string& key, const std::string& value) {
    auto bad = [&] {
      return UsageError("bad value for " + key + ": '" + value + "'");
    };
    auto as_double = [&] {
      double v = 0.0;
      if (!ParseDouble(value, &v)) throw bad();
      return v;
    };
    auto as_int = [&] {
      long long v = 0;
      if (!ParseInt(value, &v)) throw bad();
      return v;
    };
    auto as_bool = [&] {
      if (value == "true" || value == "1" || value == "yes") return true;
      if (value == "false" || value == "0" || value == "no") return false;
      throw bad();
    };
    if (key == "data") {
      data_dir = value;
    } else if (key == "out") {
      out_dir = value;
    } else if (key == "checkpoint") {
      checkpoint = value;
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(as_int());
    } else if (key == "test_fraction") {
      test_fraction = as_double();
    } else if (key == "iterations") {
      iterations = static_cast<int>(as_int());
    } else if (key == "mode") {
      if (value != "rmse" && value != "assign" && value != "both") throw bad();
      mode = value;
    } else if (key == "assign_test_fraction") {
      assign_test_fraction = as_double();
    } else if (key == "assign_iterations") {
      assign_iterations = static_cast<int>(as_int());
    } else if (key == "strategy") {
      strategy = ParseStrategy(value);
    } else if (key == "strategies") {
      strategies = ParseStrategies(value);
    } else if (key == "cp") {
      capacities.per_paper = static_cast<int>(as_int());
    } else if (key == "cr") {
      capacities.per_reviewer = static_cast<int>(as_int());
    } else if (key == "relaxed_paper_coverage") {
      capacities.relaxed_paper_coverage = as_bool();
    } else if (key == "block_conflicts") {
      block_conflicts = as_bool();
    } else if (key == "jobs") {
      jobs = static_cast<int>(as_int());
    } else if (key == "sim_exponent") {
      similarity.exponent = as_double();
    } else if (key == "sim_idf") {
      similarity.idf = as_bool();
    } else if (key == "sim_threshold") {
      similarity.threshold = as_double();
    } else if (!model.Set(key, value)) {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
};

inline std::string FormatRunConfig(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config.ToKeyValues()) {
    out += key + " = " + value + "\n";
  }
  return out;
}

// Applies every `key = value` line of `in` on top of `config`.
inline void ApplyConfigText(std::istream& in, const std::string& source,
                            RunConfig* config) {
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError(source + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    try {
      config->Set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(source + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
}

inline RunConfig ParseRunConfig(const std::string& text,
                                const std::string& source = "<config>") {
  RunConfig config;
  std::istringstream in(text);
  ApplyConfigText(in, source, &config);
  return config;
}

}  // namespace revmatch

#endif  // REVMATCH_CONFIG_H_
