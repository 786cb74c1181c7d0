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

// Command-line front end: train, evaluate, sweep-beta, sweep-eta, play, report.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "infoseek/checkpoint.hpp"
#include "infoseek/errors.hpp"
#include "infoseek/experiment.hpp"

namespace fs = std::filesystem;
using namespace infoseek;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string env;
  std::vector<std::string> strategies;
  std::optional<double> beta;
  std::string eta;  // number or "none"
  std::optional<int> episodes;
  std::optional<int> updates;
  std::string checkpoint;
  std::string betas = "0,1,10,1000";
  std::string etas = "0.05,0.01,none";
  std::string seeds = "1,2,3,4,5";
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_eta(const std::string& s) {
  if (s == "none") return std::nan("");
  return std::stod(s);
}

ExperimentConfig build_config(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.env.empty()) c.env = parse_env(o.env);
  if (o.seed) c.set_seed(*o.seed);
  if (!o.out.empty()) c.out = o.out;
  if (o.episodes) c.eval.episodes = *o.episodes;
  if (o.updates) c.trainer.total_updates = *o.updates;
  c.validate();
  return c;
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw LoadError("cannot write " + p.string());
  f << text;
}

Parameters load_params(const Options& o, const ExperimentConfig& c) {
  const fs::path path = o.checkpoint.empty() ? fs::path(c.out) / "model.ckpt" : fs::path(o.checkpoint);
  return load_checkpoint(path).params;
}

int run_train(const Options& o) {
  ExperimentConfig c = build_config(o);
  if (!o.strategies.empty()) c.trainer.decoder.strategy = parse_strategy(o.strategies.front());
  if (o.beta) c.trainer.decoder.beta = BetaSchedule::constant(*o.beta);
  if (!o.eta.empty()) {
    const double eta = parse_eta(o.eta);
    c.trainer.stopping = std::isnan(eta) ? std::nullopt : std::optional<StoppingRule>(StoppingRule{eta});
  }
  c.validate();
  const TrainResult r = run_training(c);
  std::cout << "trained " << r.curve.size() << " updates; wrote " << (fs::path(c.out) / "model.ckpt").string()
            << '\n';
  if (r.floor_violations > 0) {
    std::cerr << "variance floor violated " << r.floor_violations << " times\n";
    return 1;
  }
  return 0;
}

int run_evaluate(const Options& o) {
  ExperimentConfig c = build_config(o);
  if (!o.eta.empty()) {
    const double eta = parse_eta(o.eta);
    c.eval.stopping = std::isnan(eta) ? std::nullopt : std::optional<StoppingRule>(StoppingRule{eta});
  }
  std::vector<DecoderConfig> decoders;
  for (const auto& s : o.strategies.empty() ? std::vector<std::string>{std::string(to_string(c.eval.decoder.strategy))}
                                            : o.strategies) {
    for (const auto& name : split(s)) {
      DecoderConfig d = c.eval.decoder;
      d.strategy = parse_strategy(name);
      if (o.beta) d.beta = BetaSchedule::constant(*o.beta);
      decoders.push_back(d);
    }
  }
  const Parameters params = load_params(o, c);
  const EvaluationSuite suite = make_suite(c);
  const EvaluationReport report = evaluate(params, c, decoders, suite);
  std::ostringstream ev, sc;
  write_evaluation_csv(ev, report);
  write_success_curve_csv(sc, report);
  write_file(fs::path(c.out) / "evaluation.csv", ev.str());
  write_file(fs::path(c.out) / "success_curve.csv", sc.str());
  std::cout << ev.str();
  return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& x : split(s)) out.push_back(std::stoull(x));
  return out;
}

int run_sweep_beta(const Options& o) {
  ExperimentConfig c = build_config(o);
  if (!o.strategies.empty()) c.trainer.decoder.strategy = parse_strategy(o.strategies.front());
  std::vector<double> betas;
  for (const auto& b : split(o.betas)) betas.push_back(std::stod(b));
  const auto rows = sweep_beta(c, betas, parse_seeds(o.seeds));
  std::ostringstream ss;
  write_sweep_csv(ss, "beta", rows);
  write_file(fs::path(c.out) / "sweep_beta.csv", ss.str());
  std::cout << ss.str();
  return 0;
}

int run_sweep_eta(const Options& o) {
  ExperimentConfig c = build_config(o);
  if (!o.strategies.empty()) {
    c.trainer.decoder.strategy = c.eval.decoder.strategy = parse_strategy(o.strategies.front());
  }
  if (o.beta) c.trainer.decoder.beta = c.eval.decoder.beta = BetaSchedule::constant(*o.beta);
  std::vector<double> etas;
  for (const auto& e : split(o.etas)) etas.push_back(parse_eta(e));
  const auto rows = sweep_eta(c, etas, parse_seeds(o.seeds));
  std::ostringstream ss;
  write_sweep_csv(ss, "eta", rows);
  write_file(fs::path(c.out) / "sweep_eta.csv", ss.str());
  std::cout << ss.str();
  return 0;
}

int run_play(const Options& o) {
  ExperimentConfig c = build_config(o);
  if (!o.strategies.empty()) c.eval.decoder.strategy = parse_strategy(o.strategies.front());
  if (o.beta) c.eval.decoder.beta = BetaSchedule::constant(*o.beta);
  if (!o.eta.empty()) {
    const double eta = parse_eta(o.eta);
    c.eval.stopping = std::isnan(eta) ? std::nullopt : std::optional<StoppingRule>(StoppingRule{eta});
  }
  const Parameters params = load_params(o, c);
  fs::create_directories(c.out);
  play(c, params, std::cin, std::cout, fs::path(c.out) / "transcript.txt");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infoseek: uncertainty-driven information-seeking dialogue agents"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--env", o.env, "guesswhich or negotiation")
        ->check(CLI::IsMember({"guesswhich", "negotiation"}));
  };
  auto decoding = [&](CLI::App* sub) {
    sub->add_option("--strategy", o.strategies,
                    "greedy, sample, beam, ucb or max-entropy (comma list for evaluate)");
    sub->add_option("--beta", o.beta, "constant exploration weight");
    sub->add_option("--eta", o.eta, "entropy stopping threshold or 'none'");
  };

  auto* train = app.add_subcommand("train", "train an agent with REINFORCE self-play");
  common(train);
  decoding(train);
  train->add_option("--updates", o.updates, "number of parameter updates");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a fixed suite");
  common(evaluate);
  decoding(evaluate);
  evaluate->add_option("--episodes", o.episodes, "suite size when generated");
  evaluate->add_option("--checkpoint", o.checkpoint, "model file (default OUT/model.ckpt)");

  auto* sb = app.add_subcommand("sweep-beta", "train and evaluate per (beta, seed)");
  common(sb);
  sb->add_option("--strategy", o.strategies, "decoding strategy for both phases");
  sb->add_option("--betas", o.betas, "comma separated beta values");
  sb->add_option("--seeds", o.seeds, "comma separated seeds");
  sb->add_option("--episodes", o.episodes, "suite size");
  sb->add_option("--updates", o.updates, "updates per cell");

  auto* se = app.add_subcommand("sweep-eta", "train per seed, evaluate per stopping threshold");
  common(se);
  se->add_option("--strategy", o.strategies, "decoding strategy for both phases");
  se->add_option("--beta", o.beta, "constant exploration weight");
  se->add_option("--etas", o.etas, "comma separated thresholds, 'none' disables stopping");
  se->add_option("--seeds", o.seeds, "comma separated seeds");
  se->add_option("--episodes", o.episodes, "suite size");
  se->add_option("--updates", o.updates, "updates per seed");

  auto* pl = app.add_subcommand("play", "interactive session against a checkpoint");
  common(pl);
  decoding(pl);
  pl->add_option("--checkpoint", o.checkpoint, "model file (default OUT/model.ckpt)");

  auto* rep = app.add_subcommand("report", "export plot data from a run directory");
  rep->add_option("--out", o.out, "run directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return run_train(o);
    if (*evaluate) return run_evaluate(o);
    if (*sb) return run_sweep_beta(o);
    if (*se) return run_sweep_eta(o);
    if (*pl) return run_play(o);
    if (*rep) {
      report(o.out);
      std::cout << "wrote plot_learning_curve.csv and plot_success_curve.csv in " << o.out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
