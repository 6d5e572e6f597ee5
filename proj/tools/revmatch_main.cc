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

// Command-line front end:
//
//   revmatch ingest-check --data DIR
//   revmatch synth        --out DIR [--kind full] [--reviewers N] ...
//   revmatch train        --data DIR --out DIR [--test-fraction F] [--seed S]
//   revmatch predict      --data DIR --out DIR [--checkpoint FILE] [--pairs FILE]
//   revmatch assign       --data DIR --out DIR --strategy resid --cp 3 --cr 8
//   revmatch experiment   --data DIR --out DIR [--iterations N] [--mode both]
//
// Every subcommand accepts --config FILE (flat key = value) and
// --set key=value; explicit flags override the config file.
// Exit codes: 0 ok, 1 usage, 2 data, 3 infeasible, 4 numerical.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "revmatch/assign.h"
#include "revmatch/config.h"
#include "revmatch/dataset.h"
#include "revmatch/error.h"
#include "revmatch/experiment.h"
#include "revmatch/model.h"
#include "revmatch/synth.h"
#include "revmatch/textsim.h"

namespace revmatch {
namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kValueFlags[] = {
    {"--data", "data", "Data directory"},
    {"--out", "out", "Output directory"},
    {"--checkpoint", "checkpoint", "Model checkpoint (default <out>/model.ckpt)"},
    {"--seed", "seed", "Master seed"},
    {"--test-fraction", "test_fraction", "Held-out share for RMSE splits"},
    {"--iterations", "iterations", "Number of RMSE splits"},
    {"--assign-test-fraction", "assign_test_fraction",
     "Hidden share for the assignment experiment"},
    {"--assign-iterations", "assign_iterations",
     "Number of assignment-experiment splits"},
    {"--mode", "mode", "Experiment: rmse, assign or both"},
    {"--strategy", "strategy", "Affinity strategy: baseline, resid or norm"},
    {"--strategies", "strategies", "Experiment strategies, comma separated"},
    {"--cp", "cp", "Reviews per paper"},
    {"--cr", "cr", "Maximum reviews per reviewer"},
    {"--factors", "factors", "Latent dimensionality"},
    {"--epochs", "epochs", "SGD epochs"},
    {"--learning-rate", "learning_rate", "SGD learning rate"},
    {"--terms", "terms", "Model terms, e.g. factors,categories or all"},
    {"--jobs", "jobs", "Worker threads"},
};

constexpr FlagSpec kBoolFlags[] = {
    {"--relaxed-paper-coverage", "relaxed_paper_coverage",
     "Allow papers to receive fewer than c_p reviews"},
    {"--block-conflicts", "block_conflicts",
     "Forbid pairs conflicting with the paper's primary category"},
    {"--idf", "sim_idf", "Weight abstract terms by IDF"},
};

class ConfigFlags {
 public:
  void Attach(CLI::App* app) {
    app_ = app;
    app->add_option("--config", config_file_, "Config file (key = value)");
    app->add_option("--set", overrides_, "Extra key=value override")
        ->take_all();
    for (const auto& def : kValueFlags) {
      app->add_option(def.flag, values_[def.key], def.help);
    }
    for (const auto& def : kBoolFlags) {
      app->add_flag(def.flag, bools_[def.key], def.help);
    }
  }

  RunConfig Resolve() const {
    RunConfig config;
    if (!config_file_.empty()) {
      std::ifstream in(config_file_);
      if (!in) throw UsageError("cannot open config " + config_file_);
      ApplyConfigText(in, config_file_, &config);
    }
    for (const auto& item : overrides_) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw UsageError("--set expects key=value, got '" + item + "'");
      }
      config.Set(item.substr(0, eq), item.substr(eq + 1));
    }
    for (const auto& def : kValueFlags) {
      if (app_->count(def.flag) > 0) config.Set(def.key, values_.at(def.key));
    }
    for (const auto& def : kBoolFlags) {
      if (app_->count(def.flag) > 0) {
        config.Set(def.key, bools_.at(def.key) ? "true" : "false");
      }
    }
    return config;
  }

 private:
  CLI::App* app_ = nullptr;
  std::string config_file_;
  std::vector<std::string> overrides_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> bools_;
};

void CheckCompatible(const Dataset& data, const ModelParams& params,
                     const std::string& path) {
  if (params.num_reviewers() != data.num_reviewers() ||
      params.num_papers() != data.num_papers() ||
      params.category_weights.size() != data.num_categories()) {
    throw DataError("checkpoint " + path + " has shape " +
                    std::to_string(params.num_reviewers()) + "x" +
                    std::to_string(params.num_papers()) + "x" +
                    std::to_string(params.category_weights.size()) +
                    " but the dataset is " +
                    std::to_string(data.num_reviewers()) + "x" +
                    std::to_string(data.num_papers()) + "x" +
                    std::to_string(data.num_categories()));
  }
}

int CmdIngestCheck(const RunConfig& config) {
  const Dataset data = LoadDataset(config.data_dir);
  std::cout << "reviewers " << data.num_reviewers() << '\n'
            << "papers " << data.num_papers() << '\n'
            << "categories " << data.num_categories() << '\n'
            << "bids " << data.bids.size() << '\n'
            << "coauthor_pairs " << data.coauthors.pair_count() << '\n';
  if (!data.bids.empty()) {
    std::cout << "mean_rating " << FormatDouble(GlobalMean(data.bids)) << '\n';
  }
  return 0;
}

struct SynthFlags {
  std::string kind = "full";
  int reviewers = 80;
  int papers = 160;
  int categories = 12;
  double density = 0.15;
};

int CmdSynth(const RunConfig& config, const SynthFlags& flags) {
  SynthConfig sc = SynthConfig::ForKind(flags.kind);
  sc.reviewers = flags.reviewers;
  sc.papers = flags.papers;
  sc.categories = flags.categories;
  sc.density = flags.density;
  sc.seed = config.seed;
  const Dataset data = GenerateSynthetic(sc);
  WriteDataset(data, config.out_dir);
  std::cout << "wrote " << data.num_reviewers() << " reviewers, "
            << data.num_papers() << " papers, " << data.bids.size()
            << " bids to " << config.out_dir << '\n';
  return 0;
}

int CmdTrain(const RunConfig& config) {
  const Dataset data = LoadDataset(config.data_dir);
  const PaperSimilarity sims = PaperSimilarities(data.corpus, config.similarity);
  BidSet train = data.bids;
  BidSet test;
  if (config.test_fraction > 0.0) {
    Split split = MakeSplit(data.bids, config.test_fraction, config.seed);
    train = std::move(split.train);
    test = std::move(split.test);
  }
  const TrainingView view(data, train, sims);
  const ModelParams params = Train(data, view, train, config.model);
  std::filesystem::create_directories(config.out_dir);
  const std::string ckpt_path = config.CheckpointPath();
  SaveCheckpoint(ckpt_path, Checkpoint{config.model, params});

  const double train_rmse = Rmse(params, config.model, view, train);
  auto out = OpenOutput(config.out_dir + "/train_summary.txt");
  auto emit = [&](const std::string& line) {
    std::cout << line << '\n';
    out << line << '\n';
  };
  emit("checkpoint " + ckpt_path);
  emit("train_bids " + std::to_string(train.size()));
  emit("train_rmse " + FormatDouble(train_rmse));
  if (!test.empty()) {
    emit("test_bids " + std::to_string(test.size()));
    emit("test_rmse " + FormatDouble(Rmse(params, config.model, view, test)));
  }
  emit("gamma " + FormatDouble(params.gamma));
  emit("phi " + FormatDouble(params.phi));
  return 0;
}

std::vector<std::pair<ReviewerId, PaperId>> ReadPairs(const std::string& path,
                                                      const Dataset& data) {
  auto in = OpenInput(path);
  CsvReader reader(in, path);
  reader.ExpectHeader({"reviewer", "paper"});
  std::vector<std::pair<ReviewerId, PaperId>> pairs;
  CsvRow row;
  while (reader.Next(&row)) {
    if (row.fields.size() != 2) reader.Fail(row.line, "expected 2 fields");
    const auto u = data.reviewers.Find(row.fields[0]);
    const auto i = data.papers.Find(row.fields[1]);
    if (!u || !i) reader.Fail(row.line, "unknown reviewer or paper");
    pairs.emplace_back(*u, *i);
  }
  return pairs;
}

int CmdPredict(const RunConfig& config, const std::string& pairs_file) {
  const Dataset data = LoadDataset(config.data_dir);
  const std::string ckpt_path = config.CheckpointPath();
  const Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  CheckCompatible(data, ckpt.params, ckpt_path);
  const PaperSimilarity sims = PaperSimilarities(data.corpus, config.similarity);
  const TrainingView view(data, data.bids, sims);
  std::vector<std::pair<ReviewerId, PaperId>> pairs;
  if (!pairs_file.empty()) {
    pairs = ReadPairs(pairs_file, data);
  } else {
    for (std::size_t u = 0; u < data.num_reviewers(); ++u) {
      for (std::size_t i = 0; i < data.num_papers(); ++i) {
        pairs.emplace_back(ReviewerId(static_cast<int>(u)),
                           PaperId(static_cast<int>(i)));
      }
    }
  }
  std::filesystem::create_directories(config.out_dir);
  const std::string path = config.out_dir + "/predictions.csv";
  WritePredictions(path, data, ckpt.params, ckpt.config, view, pairs);
  std::cout << "wrote " << pairs.size() << " predictions to " << path << '\n';
  return 0;
}

int CmdAssign(const RunConfig& config) {
  const Dataset data = LoadDataset(config.data_dir);
  AffinityMatrix predicted(data.num_reviewers(), data.num_papers(), 0.0);
  if (config.strategy != Strategy::kBaseline) {
    const std::string ckpt_path = config.CheckpointPath();
    const Checkpoint ckpt = LoadCheckpoint(ckpt_path);
    CheckCompatible(data, ckpt.params, ckpt_path);
    const PaperSimilarity sims =
        PaperSimilarities(data.corpus, config.similarity);
    const TrainingView view(data, data.bids, sims);
    predicted = PredictAll(ckpt.params, ckpt.config, view);
  }
  const AffinityMatrix affinity =
      BuildAffinity(data.bids, predicted, config.strategy);
  std::optional<DenseMatrix<std::uint8_t>> mask;
  SolverOptions options;
  if (config.block_conflicts) {
    mask = PrimaryConflictMask(data);
    options.forbidden = &*mask;
  }
  const auto start = std::chrono::steady_clock::now();
  const SolveResult result =
      SolveAssignment(affinity, config.capacities, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::filesystem::create_directories(config.out_dir);
  WriteAssignments(config.out_dir + "/assignments.csv", data,
                   result.assignment);
  PrintSolveSummary(std::cout, result, config.capacities, seconds);
  return 0;
}

int CmdExperiment(const RunConfig& config) {
  const Dataset data = LoadDataset(config.data_dir);
  const PaperSimilarity sims = PaperSimilarities(data.corpus, config.similarity);
  ExperimentReport report;
  if (config.mode == "rmse" || config.mode == "both") {
    RmseExperimentOptions options;
    options.iterations = config.iterations;
    options.test_fraction = config.test_fraction;
    options.master_seed = config.seed;
    options.jobs = config.jobs;
    report.rmse = RunRmseExperiment(data, sims, config.model, options);
    for (const auto& v : report.rmse->variants) {
      std::cout << v.name() << " rmse_mean " << FormatDouble(v.summary.mean)
                << " sd " << FormatDouble(v.summary.sd) << '\n';
    }
  }
  if (config.mode == "assign" || config.mode == "both") {
    AssignmentExperimentOptions options;
    options.iterations = config.assign_iterations;
    options.test_fraction = config.assign_test_fraction;
    options.master_seed = config.seed;
    options.strategies = config.strategies;
    options.capacities = config.capacities;
    options.block_conflicts = config.block_conflicts;
    options.jobs = config.jobs;
    report.assignment =
        RunAssignmentExperiment(data, sims, config.model, options);
    for (const auto& s : report.assignment->strategies) {
      std::cout << ToString(s.strategy) << " high "
                << FormatDouble(s.MeanFraction(kHigh)) << " ok "
                << FormatDouble(s.MeanFraction(kOk)) << " low "
                << FormatDouble(s.MeanFraction(kLow)) << " no "
                << FormatDouble(s.MeanFraction(kNo)) << '\n';
    }
  }
  std::filesystem::create_directories(config.out_dir);
  WriteReportCsv(config.out_dir + "/report.csv", report);
  WriteReportJson(config.out_dir + "/report.json", report,
                  config.ToKeyValues());
  std::cout << "wrote " << config.out_dir << "/report.csv and report.json\n";
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Reviewer-paper preference modelling and assignment"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    ConfigFlags flags;
  };
  std::map<std::string, Sub> subs;
  const std::pair<const char*, const char*> names[] = {
      {"ingest-check", "Load and validate a data directory"},
      {"synth", "Generate a synthetic dataset with planted structure"},
      {"train", "Train a model and write a checkpoint"},
      {"predict", "Write predicted ratings"},
      {"assign", "Solve the reviewer-paper assignment"},
      {"experiment", "Run the repeated-split evaluation protocols"},
  };
  for (const auto& [name, help] : names) {
    Sub& sub = subs[name];
    sub.app = app.add_subcommand(name, help);
    sub.flags.Attach(sub.app);
  }
  SynthFlags synth;
  subs["synth"].app->add_option("--kind", synth.kind,
                                "bias, factor, category, similarity or full");
  subs["synth"].app->add_option("--reviewers", synth.reviewers);
  subs["synth"].app->add_option("--papers", synth.papers);
  subs["synth"].app->add_option("--categories", synth.categories);
  subs["synth"].app->add_option("--density", synth.density);
  std::string pairs_file;
  subs["predict"].app->add_option("--pairs", pairs_file,
                                  "CSV with header reviewer,paper");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  try {
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      const RunConfig config = sub.flags.Resolve();
      if (name == "ingest-check") return CmdIngestCheck(config);
      if (name == "synth") return CmdSynth(config, synth);
      if (name == "train") return CmdTrain(config);
      if (name == "predict") return CmdPredict(config, pairs_file);
      if (name == "assign") return CmdAssign(config);
      if (name == "experiment") return CmdExperiment(config);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kData);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kData);
  }
  return static_cast<int>(ErrorKind::kUsage);
}

}  // namespace
}  // namespace revmatch

int main(int argc, char** argv) { return revmatch::Main(argc, argv); }
