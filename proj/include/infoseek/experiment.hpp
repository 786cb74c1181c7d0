// Copyright 2026 The Infoseek Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment orchestration: configuration files, fixed-suite evaluation,
// beta and eta sweeps, report export and an interactive play mode.
#ifndef INFOSEEK_EXPERIMENT_HPP_
#define INFOSEEK_EXPERIMENT_HPP_

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infoseek/guesswhich.hpp"
#include "infoseek/negotiation.hpp"
#include "infoseek/trainer.hpp"

namespace infoseek {

enum class EnvKind { kGuessWhich, kNegotiation };
std::string_view to_string(EnvKind e);
EnvKind parse_env(std::string_view name);  // guesswhich | negotiation

struct ModelConfig {
  int embed_dim = 16;
  int hidden_dim = 64;
  double init_scale = 0.1;
};

struct EvalConfig {
  int episodes = 1000;
  // Games (or setups) file; empty: generate from suite_seed.
  std::string suite;
  std::uint64_t suite_seed = 12345;
  DecoderConfig decoder;
  std::optional<StoppingRule> stopping;
};

struct ExperimentConfig {
  EnvKind env = EnvKind::kGuessWhich;
  GuessWhichConfig guesswhich;
  NegotiationConfig negotiation;
  ModelConfig model;
  TrainerConfig trainer;  // also holds the training decoder, ensemble and stopping
  EvalConfig eval;
  int checkpoint_interval = 0;
  std::string out = "run";
  std::uint64_t seed = 0;

  void validate() const;
  // Propagates `seed` into the trainer.
  void set_seed(std::uint64_t s);
};

// Missing keys keep their defaults; unknown keys are a ConfigError.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config);
Parameters initial_parameters(const ExperimentConfig& config, const Vocabulary& vocab);

// Evaluation games, identical for every strategy.
struct EvaluationSuite {
  std::vector<GameInstance> games;
  std::vector<NegotiationSetup> setups;
  std::size_t size() const { return games.empty() ? setups.size() : games.size(); }
};

EvaluationSuite make_suite(const ExperimentConfig& config);
void write_suite(const std::filesystem::path& path, const ExperimentConfig& config,
                 const EvaluationSuite& suite);

struct StrategyReport {
  std::string strategy;
  int episodes = 0;
  double success_rate = 0.0;  // GuessWhich: correct guesses; negotiation: deals reached
  double mean_points = std::numeric_limits<double>::quiet_NaN();  // negotiation only
  double mean_statements = 0.0;
  // success_curve[k]: fraction of episodes that succeeded with at most k statements.
  std::vector<double> success_curve;
  double mean_cum_regret = std::numeric_limits<double>::quiet_NaN();
};

struct EvaluationReport {
  std::vector<StrategyReport> rows;
};

// Greedy, sample and beam rows use the dropout-free network, so greedy and
// beam are deterministic; ucb and max-entropy query the ensemble.
StrategyReport evaluate_strategy(const Parameters& params, const Environment& env,
                                 const EvaluationSuite& suite, const DecoderConfig& decoder,
                                 const EnsembleConfig& ensemble,
                                 const std::optional<StoppingRule>& stopping, std::uint64_t seed,
                                 int max_rounds);

EvaluationReport evaluate(const Parameters& params, const ExperimentConfig& config,
                          const std::vector<DecoderConfig>& strategies,
                          const EvaluationSuite& suite);

void write_evaluation_csv(std::ostream& out, const EvaluationReport& report);
void write_success_curve_csv(std::ostream& out, const EvaluationReport& report);

// Trains with config (writing learning_curve.csv, checkpoints and the final
// model.ckpt under config.out) and returns the result.
TrainResult run_training(const ExperimentConfig& config, bool write_files = true);

struct SweepRow {
  std::string label;  // beta or eta value, "none" for disabled stopping
  double value = 0.0;
  int seeds = 0;
  double success_mean = 0.0, success_std = 0.0;
  double points_mean = std::numeric_limits<double>::quiet_NaN();
  double points_std = std::numeric_limits<double>::quiet_NaN();
  double statements_mean = 0.0, statements_std = 0.0;
  std::vector<double> per_seed;  // headline metric per seed
};

// Trains and evaluates one agent per (beta, seed) with the configured
// strategy used for both phases.
std::vector<SweepRow> sweep_beta(const ExperimentConfig& config, const std::vector<double>& betas,
                                 const std::vector<std::uint64_t>& seeds);
// Trains one agent per seed without stopping, then evaluates it under each
// eta. A NaN entry in `etas` means no stopping rule.
std::vector<SweepRow> sweep_eta(const ExperimentConfig& config, const std::vector<double>& etas,
                                const std::vector<std::uint64_t>& seeds);
void write_sweep_csv(std::ostream& out, std::string_view parameter,
                     const std::vector<SweepRow>& rows);

// Reads learning_curve.csv and success_curve.csv from `run_dir` and writes
// plot_learning_curve.csv and plot_success_curve.csv next to them. Missing
// inputs raise LoadError naming every absent file.
void report(const std::filesystem::path& run_dir);

// Interactive session on `in`/`out`. GuessWhich: the agent asks, the human
// answers yes/no/na about an object of their choice. Negotiation: the human
// plays agent B with "propose book N hat N ball N" or "agree". "quit" ends
// the session. Returns the transcript, which is also written to
// `transcript_path` when non-empty.
std::vector<std::string> play(const ExperimentConfig& config, const Parameters& params,
                              std::istream& in, std::ostream& out,
                              const std::filesystem::path& transcript_path = {});

}  // namespace infoseek

#endif  // INFOSEEK_EXPERIMENT_HPP_
