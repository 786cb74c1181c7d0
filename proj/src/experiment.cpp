// Copyright 2026 The Infoseek Authors
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

#include "infoseek/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "infoseek/checkpoint.hpp"
#include "infoseek/errors.hpp"
#include "infoseek/format.hpp"

namespace infoseek {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void get(const json& j, const char* key, T& dst, const char* where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

std::optional<StoppingRule> read_eta(const json& j, const char* where) {
  if (!j.contains("eta") || j.at("eta").is_null()) return std::nullopt;
  double eta = 0.0;
  get(j, "eta", eta, where);
  return StoppingRule{eta};
}

json write_eta(const std::optional<StoppingRule>& s) { return s ? json(s->eta) : json(nullptr); }

BetaSchedule read_beta(const json& j, const char* where) {
  if (j.is_number()) return BetaSchedule::constant(j.get<double>());
  if (j.is_array()) {
    BetaSchedule b;
    b.per_step = j.get<std::vector<double>>();
    if (!b.per_step.empty()) b.value = b.final_value = b.per_step.back();
    return b;
  }
  check_keys(j, {"from", "to", "steps"}, where);
  double from = 1.0, to = 1.0;
  int steps = 0;
  get(j, "from", from, where);
  get(j, "to", to, where);
  get(j, "steps", steps, where);
  return BetaSchedule::linear(from, to, steps);
}

json write_beta(const BetaSchedule& b) {
  if (!b.per_step.empty()) return b.per_step;
  if (b.decay_steps > 0) return {{"from", b.value}, {"to", b.final_value}, {"steps", b.decay_steps}};
  return b.value;
}

void read_decoder(const json& j, DecoderConfig& d, const char* where) {
  check_keys(j, {"strategy", "beta", "beam_width", "max_statement_len", "ucb_exponent"}, where);
  if (j.contains("strategy")) {
    std::string s;
    get(j, "strategy", s, where);
    d.strategy = parse_strategy(s);
  }
  if (j.contains("beta")) d.beta = read_beta(j.at("beta"), where);
  get(j, "beam_width", d.beam_width, where);
  get(j, "max_statement_len", d.max_statement_len, where);
  get(j, "ucb_exponent", d.ucb_exponent, where);
}

json write_decoder(const DecoderConfig& d) {
  return {{"strategy", std::string(to_string(d.strategy))},
          {"beta", write_beta(d.beta)},
          {"beam_width", d.beam_width},
          {"max_statement_len", d.max_statement_len},
          {"ucb_exponent", d.ucb_exponent}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw LoadError("cannot write " + path.string());
  f << text;
}

double headline(const ExperimentConfig& c, const StrategyReport& r) {
  return c.env == EnvKind::kGuessWhich ? r.success_rate : r.mean_points;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {std::nan(""), std::nan("")};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

std::string label_of(double v) { return std::isnan(v) ? "none" : format_number(v); }

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line) || line != header) {
    throw LoadError(path.filename().string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s, const std::filesystem::path& file) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw LoadError(file.filename().string() + ": bad number '" + s + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string join(const Vocabulary& v, std::span<const TokenId> tokens) {
  std::string s;
  for (TokenId t : tokens) {
    if (!s.empty()) s += ' ';
    s += v.token(t);
  }
  return s;
}

EnsembleConfig eval_ensemble(const DecoderConfig& d, EnsembleConfig e) {
  switch (d.strategy) {
    case Strategy::kGreedy:
    case Strategy::kSample:
    case Strategy::kBeam:
      e.samples = 1;
      e.dropout_rate = 0.0;
      break;
    default: break;
  }
  return e;
}

void print_steps(std::ostream& out, const Vocabulary& v, const DecodedStatement& d) {
  for (const auto& s : d.steps) {
    if (s.mean.size() == 0) continue;
    char buf[160];
    std::snprintf(buf, sizeof buf, "    %-14s mu=%+.4f sigma=%.4f bound=%+.4f\n",
                  v.token(s.token).c_str(), s.mean(s.token), s.std(s.token),
                  s.mean(s.token) + s.beta * s.std(s.token));
    out << buf;
  }
}

}  // namespace

std::string_view to_string(EnvKind e) {
  return e == EnvKind::kGuessWhich ? "guesswhich" : "negotiation";
}

EnvKind parse_env(std::string_view name) {
  if (name == "guesswhich") return EnvKind::kGuessWhich;
  if (name == "negotiation") return EnvKind::kNegotiation;
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  guesswhich.validate();
  negotiation.validate();
  trainer.validate();
  eval.decoder.validate();
  if (model.embed_dim < 1 || model.hidden_dim < 1) throw ConfigError("model: dimensions must be >= 1");
  if (!(model.init_scale >= 0.0)) throw ConfigError("model: init_scale must be >= 0");
  if (eval.episodes < 1) throw ConfigError("eval: episodes must be >= 1");
  if (eval.stopping && !(eval.stopping->eta >= 0.0)) throw ConfigError("eval: eta must be >= 0");
  if (checkpoint_interval < 0) throw ConfigError("checkpoint_interval must be >= 0");
}

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed = s;
  trainer.seed = s;
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  check_keys(j, {"env", "seed", "out", "checkpoint_interval", "model", "guesswhich", "negotiation",
                 "trainer", "eval"},
             "config");
  if (j.contains("env")) {
    std::string env;
    get(j, "env", env, "config");
    c.env = parse_env(env);
  }
  get(j, "seed", c.seed, "config");
  get(j, "out", c.out, "config");
  get(j, "checkpoint_interval", c.checkpoint_interval, "config");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    check_keys(m, {"embed_dim", "hidden_dim", "init_scale"}, "model");
    get(m, "embed_dim", c.model.embed_dim, "model");
    get(m, "hidden_dim", c.model.hidden_dim, "model");
    get(m, "init_scale", c.model.init_scale, "model");
  }
  if (j.contains("guesswhich")) {
    const auto& g = j.at("guesswhich");
    check_keys(g, {"num_objects", "max_rounds", "max_statement_len", "epsilon", "constrained",
                   "agent_stop", "schema"},
               "guesswhich");
    auto& gw = c.guesswhich;
    get(g, "num_objects", gw.num_objects, "guesswhich");
    get(g, "max_rounds", gw.max_rounds, "guesswhich");
    get(g, "max_statement_len", gw.max_statement_len, "guesswhich");
    get(g, "epsilon", gw.epsilon, "guesswhich");
    get(g, "constrained", gw.constrained, "guesswhich");
    get(g, "agent_stop", gw.agent_stop, "guesswhich");
    if (g.contains("schema")) {
      gw.schema.attributes.clear();
      for (const auto& [name, values] : g.at("schema").items()) {
        gw.schema.attributes.push_back({name, values.get<std::vector<std::string>>()});
      }
    }
  }
  if (j.contains("negotiation")) {
    const auto& n = j.at("negotiation");
    check_keys(n, {"max_turns", "constrained", "opponent_threshold"}, "negotiation");
    get(n, "max_turns", c.negotiation.max_turns, "negotiation");
    get(n, "constrained", c.negotiation.constrained, "negotiation");
    get(n, "opponent_threshold", c.negotiation.opponent_threshold, "negotiation");
  }
  if (j.contains("trainer")) {
    const auto& t = j.at("trainer");
    check_keys(t, {"gamma", "learning_rate", "baseline_decay", "episodes_per_update",
                   "total_updates", "max_grad_norm", "threads", "eta", "decoder", "ensemble"},
               "trainer");
    auto& tc = c.trainer;
    get(t, "gamma", tc.gamma, "trainer");
    get(t, "learning_rate", tc.learning_rate, "trainer");
    get(t, "baseline_decay", tc.baseline_decay, "trainer");
    get(t, "episodes_per_update", tc.episodes_per_update, "trainer");
    get(t, "total_updates", tc.total_updates, "trainer");
    get(t, "max_grad_norm", tc.max_grad_norm, "trainer");
    get(t, "threads", tc.threads, "trainer");
    tc.stopping = read_eta(t, "trainer");
    if (t.contains("decoder")) read_decoder(t.at("decoder"), tc.decoder, "trainer.decoder");
    if (t.contains("ensemble")) {
      const auto& e = t.at("ensemble");
      check_keys(e, {"samples", "dropout_rate", "tau"}, "trainer.ensemble");
      get(e, "samples", tc.ensemble.samples, "trainer.ensemble");
      get(e, "dropout_rate", tc.ensemble.dropout_rate, "trainer.ensemble");
      get(e, "tau", tc.ensemble.tau, "trainer.ensemble");
    }
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    check_keys(e, {"episodes", "suite", "suite_seed", "eta", "decoder"}, "eval");
    get(e, "episodes", c.eval.episodes, "eval");
    get(e, "suite", c.eval.suite, "eval");
    get(e, "suite_seed", c.eval.suite_seed, "eval");
    c.eval.stopping = read_eta(e, "eval");
    if (e.contains("decoder")) read_decoder(e.at("decoder"), c.eval.decoder, "eval.decoder");
  }
  c.trainer.seed = c.seed;
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json schema = json::object();
  for (const auto& a : c.guesswhich.schema.attributes) schema[a.name] = a.values;
  const auto& gw = c.guesswhich;
  const auto& t = c.trainer;
  json j = {
      {"env", std::string(to_string(c.env))},
      {"seed", c.seed},
      {"out", c.out},
      {"checkpoint_interval", c.checkpoint_interval},
      {"model",
       {{"embed_dim", c.model.embed_dim},
        {"hidden_dim", c.model.hidden_dim},
        {"init_scale", c.model.init_scale}}},
      {"guesswhich",
       {{"num_objects", gw.num_objects},
        {"max_rounds", gw.max_rounds},
        {"max_statement_len", gw.max_statement_len},
        {"epsilon", gw.epsilon},
        {"constrained", gw.constrained},
        {"agent_stop", gw.agent_stop},
        {"schema", schema}}},
      {"negotiation",
       {{"max_turns", c.negotiation.max_turns},
        {"constrained", c.negotiation.constrained},
        {"opponent_threshold", c.negotiation.opponent_threshold}}},
      {"trainer",
       {{"gamma", t.gamma},
        {"learning_rate", t.learning_rate},
        {"baseline_decay", t.baseline_decay},
        {"episodes_per_update", t.episodes_per_update},
        {"total_updates", t.total_updates},
        {"max_grad_norm", t.max_grad_norm},
        {"threads", t.threads},
        {"eta", write_eta(t.stopping)},
        {"decoder", write_decoder(t.decoder)},
        {"ensemble",
         {{"samples", t.ensemble.samples},
          {"dropout_rate", t.ensemble.dropout_rate},
          {"tau", t.ensemble.tau}}}}},
      {"eval",
       {{"episodes", c.eval.episodes},
        {"suite", c.eval.suite},
        {"suite_seed", c.eval.suite_seed},
        {"eta", write_eta(c.eval.stopping)},
        {"decoder", write_decoder(c.eval.decoder)}}},
  };
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config) {
  if (config.env == EnvKind::kGuessWhich) {
    return std::make_unique<GuessWhichEnvironment>(config.guesswhich);
  }
  return std::make_unique<NegotiationEnvironment>(config.negotiation);
}

Parameters initial_parameters(const ExperimentConfig& config, const Vocabulary& vocab) {
  Rng rng = make_rng(config.seed, {0x696e6974});
  return Parameters::uniform(vocab.size(), config.model.embed_dim, config.model.hidden_dim, rng,
                             config.model.init_scale);
}

EvaluationSuite make_suite(const ExperimentConfig& config) {
  EvaluationSuite suite;
  if (!config.eval.suite.empty()) {
    std::ifstream f(config.eval.suite);
    if (!f) throw LoadError("cannot read suite " + config.eval.suite);
    if (config.env == EnvKind::kGuessWhich) {
      suite.games = read_games(f, config.guesswhich.schema);
      for (const auto& g : suite.games) {
        if (g.num_objects() != config.guesswhich.num_objects) {
          throw LoadError("suite: game size differs from num_objects");
        }
      }
    } else {
      suite.setups = read_setups(f);
    }
    if (suite.size() == 0) throw LoadError("suite " + config.eval.suite + " is empty");
    return suite;
  }
  for (int i = 0; i < config.eval.episodes; ++i) {
    Rng rng = make_rng(config.eval.suite_seed, {static_cast<std::uint64_t>(i)});
    if (config.env == EnvKind::kGuessWhich) {
      suite.games.push_back(
          generate_game(config.guesswhich.num_objects, config.guesswhich.schema, rng));
    } else {
      suite.setups.push_back(sample_values(rng));
    }
  }
  return suite;
}

void write_suite(const std::filesystem::path& path, const ExperimentConfig& config,
                 const EvaluationSuite& suite) {
  std::ostringstream ss;
  if (config.env == EnvKind::kGuessWhich) {
    write_games(ss, config.guesswhich.schema, suite.games);
  } else {
    write_setups(ss, suite.setups);
  }
  write_text(path, ss.str());
}

StrategyReport evaluate_strategy(const Parameters& params, const Environment& env,
                                 const EvaluationSuite& suite, const DecoderConfig& decoder,
                                 const EnsembleConfig& ensemble,
                                 const std::optional<StoppingRule>& stopping, std::uint64_t seed,
                                 int max_rounds) {
  const auto* gw = dynamic_cast<const GuessWhichEnvironment*>(&env);
  const auto* ng = dynamic_cast<const NegotiationEnvironment*>(&env);
  if (gw ? suite.games.empty() : suite.setups.empty()) {
    throw ConfigError("evaluate: suite does not match the environment");
  }
  const int n = static_cast<int>(suite.size());
  const EnsembleConfig ens = eval_ensemble(decoder, ensemble);
  std::vector<Trajectory> results(static_cast<std::size_t>(n));
  parallel_for(n, configured_threads(), [&](int i) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(i)});
    const auto idx = static_cast<std::size_t>(i);
    if (gw) {
      results[idx] = gw->play(suite.games[idx], params, decoder, ens, stopping, rng);
    } else {
      const Agent first = i % 2 == 0 ? Agent::kA : Agent::kB;
      results[idx] = ng->play(suite.setups[idx], first, params, decoder, ens, rng);
    }
  });

  StrategyReport r;
  r.strategy = std::string(to_string(decoder.strategy));
  r.episodes = n;
  r.success_curve.assign(static_cast<std::size_t>(max_rounds) + 1, 0.0);
  double points = 0.0, statements = 0.0, wins = 0.0;
  for (const auto& t : results) {
    statements += t.statements;
    if (ng) points += t.points;
    if (!t.success) continue;
    wins += 1.0;
    const int k = std::clamp(t.statements, 0, max_rounds);
    for (int j = k; j <= max_rounds; ++j) r.success_curve[static_cast<std::size_t>(j)] += 1.0;
  }
  for (auto& v : r.success_curve) v /= n;
  r.success_rate = wins / n;
  r.mean_statements = statements / n;
  if (ng) r.mean_points = points / n;
  return r;
}

EvaluationReport evaluate(const Parameters& params, const ExperimentConfig& config,
                          const std::vector<DecoderConfig>& strategies,
                          const EvaluationSuite& suite) {
  config.validate();
  const auto env = make_environment(config);
  const int rounds = config.env == EnvKind::kGuessWhich ? config.guesswhich.max_rounds
                                                        : (config.negotiation.max_turns + 1) / 2;
  EvaluationReport report;
  for (const auto& d : strategies) {
    d.validate();
    report.rows.push_back(evaluate_strategy(params, *env, suite, d, config.trainer.ensemble,
                                            config.eval.stopping,
                                            make_rng(config.seed, {0x6576616c})(), rounds));
  }
  return report;
}

void write_evaluation_csv(std::ostream& out, const EvaluationReport& report) {
  out << "strategy,episodes,success_rate,mean_points,mean_statements,mean_cum_regret\n";
  for (const auto& r : report.rows) {
    out << r.strategy << ',' << r.episodes << ',' << format_number(r.success_rate) << ','
        << format_number(r.mean_points) << ',' << format_number(r.mean_statements) << ','
        << format_number(r.mean_cum_regret) << '\n';
  }
}

void write_success_curve_csv(std::ostream& out, const EvaluationReport& report) {
  out << "strategy,statements,success\n";
  for (const auto& r : report.rows) {
    for (std::size_t k = 0; k < r.success_curve.size(); ++k) {
      out << r.strategy << ',' << k << ',' << format_number(r.success_curve[k]) << '\n';
    }
  }
}

TrainResult run_training(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const auto env = make_environment(config);
  TrainerConfig tc = config.trainer;
  tc.seed = config.seed;
  const std::filesystem::path dir(config.out);
  if (write_files) std::filesystem::create_directories(dir);

  TrainHooks hooks;
  if (write_files && config.checkpoint_interval > 0) {
    hooks.checkpoint_interval = config.checkpoint_interval;
    hooks.on_checkpoint = [&](int u, const Parameters& p) {
      save_checkpoint(dir / ("checkpoint_" + std::to_string(u) + ".ckpt"), env->vocabulary(), p);
    };
  }
  TrainResult result = train(tc, *env, initial_parameters(config, env->vocabulary()), hooks);
  if (write_files) {
    std::ostringstream curve;
    write_learning_curve(curve, result.curve);
    write_text(dir / "learning_curve.csv", curve.str());
    save_checkpoint(dir / "model.ckpt", env->vocabulary(), result.params);
    write_text(dir / "config.json", config_to_json(config));
  }
  return result;
}

std::vector<SweepRow> sweep_beta(const ExperimentConfig& config, const std::vector<double>& betas,
                                 const std::vector<std::uint64_t>& seeds) {
  if (betas.empty() || seeds.empty()) throw ConfigError("sweep_beta: need a beta and a seed");
  const EvaluationSuite suite = make_suite(config);
  const std::size_t cells = betas.size() * seeds.size();
  std::vector<StrategyReport> reports(cells);
  parallel_for(static_cast<int>(cells), configured_threads(), [&](int c) {
    const double beta = betas[static_cast<std::size_t>(c) / seeds.size()];
    const std::uint64_t seed = seeds[static_cast<std::size_t>(c) % seeds.size()];
    ExperimentConfig cell = config;
    cell.set_seed(seed);
    cell.trainer.threads = 1;
    cell.trainer.decoder.beta = BetaSchedule::constant(beta);
    cell.eval.decoder = cell.trainer.decoder;
    const bool files = !config.out.empty();
    if (files) {
      cell.out = (std::filesystem::path(config.out) / ("beta_" + label_of(beta)) /
                  ("seed_" + std::to_string(seed)))
                     .string();
    }
    const TrainResult trained = run_training(cell, files);
    const auto report = evaluate(trained.params, cell, {cell.eval.decoder}, suite);
    reports[static_cast<std::size_t>(c)] = report.rows.front();
    if (files) {
      std::ostringstream ss;
      write_evaluation_csv(ss, report);
      write_text(std::filesystem::path(cell.out) / "evaluation.csv", ss.str());
    }
  });

  std::vector<SweepRow> rows;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    SweepRow row;
    row.label = label_of(betas[b]);
    row.value = betas[b];
    row.seeds = static_cast<int>(seeds.size());
    std::vector<double> succ, pts, len;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& r = reports[b * seeds.size() + s];
      succ.push_back(r.success_rate);
      pts.push_back(r.mean_points);
      len.push_back(r.mean_statements);
      row.per_seed.push_back(headline(config, r));
    }
    std::tie(row.success_mean, row.success_std) = mean_std(succ);
    std::tie(row.statements_mean, row.statements_std) = mean_std(len);
    if (config.env == EnvKind::kNegotiation) std::tie(row.points_mean, row.points_std) = mean_std(pts);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> sweep_eta(const ExperimentConfig& config, const std::vector<double>& etas,
                                const std::vector<std::uint64_t>& seeds) {
  if (etas.empty() || seeds.empty()) throw ConfigError("sweep_eta: need an eta and a seed");
  if (config.env != EnvKind::kGuessWhich) throw ConfigError("sweep_eta: guesswhich only");
  const EvaluationSuite suite = make_suite(config);
  std::vector<std::vector<StrategyReport>> reports(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), configured_threads(), [&](int s) {
    ExperimentConfig cell = config;
    cell.set_seed(seeds[static_cast<std::size_t>(s)]);
    cell.trainer.threads = 1;
    cell.trainer.stopping.reset();
    const bool files = !config.out.empty();
    if (files) {
      cell.out = (std::filesystem::path(config.out) / ("seed_" + std::to_string(cell.seed))).string();
    }
    const TrainResult trained = run_training(cell, files);
    for (double eta : etas) {
      cell.eval.stopping = std::isnan(eta) ? std::nullopt : std::optional<StoppingRule>(StoppingRule{eta});
      reports[static_cast<std::size_t>(s)].push_back(
          evaluate(trained.params, cell, {cell.eval.decoder}, suite).rows.front());
    }
  });

  std::vector<SweepRow> rows;
  for (std::size_t e = 0; e < etas.size(); ++e) {
    SweepRow row;
    row.label = label_of(etas[e]);
    row.value = etas[e];
    row.seeds = static_cast<int>(seeds.size());
    std::vector<double> succ, len;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      succ.push_back(reports[s][e].success_rate);
      len.push_back(reports[s][e].mean_statements);
      row.per_seed.push_back(reports[s][e].success_rate);
    }
    std::tie(row.success_mean, row.success_std) = mean_std(succ);
    std::tie(row.statements_mean, row.statements_std) = mean_std(len);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::string_view parameter,
                     const std::vector<SweepRow>& rows) {
  out << parameter
      << ",seeds,success_mean,success_std,points_mean,points_std,statements_mean,statements_std\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.seeds << ',' << format_number(r.success_mean) << ','
        << format_number(r.success_std) << ',' << format_number(r.points_mean) << ','
        << format_number(r.points_std) << ',' << format_number(r.statements_mean) << ','
        << format_number(r.statements_std) << '\n';
  }
}

void report(const std::filesystem::path& run_dir) {
  const auto curve_path = run_dir / "learning_curve.csv";
  const auto success_path = run_dir / "success_curve.csv";
  std::vector<std::string> missing;
  for (const auto& p : {curve_path, success_path}) {
    if (!std::filesystem::exists(p)) missing.push_back(p.string());
  }
  if (!missing.empty()) {
    std::string msg = "report: missing";
    for (const auto& m : missing) msg += " " + m;
    throw LoadError(msg);
  }

  std::ifstream cf(curve_path);
  const auto curve = read_learning_curve(cf);
  std::ostringstream lc;
  lc << "update,mean_reward,smoothed_reward,mean_len,mean_stop_entropy\n";
  // Trailing mean over the last 50 updates.
  double window = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    window += curve[i].mean_reward;
    if (i >= 50) window -= curve[i - 50].mean_reward;
    const double smooth = window / static_cast<double>(std::min<std::size_t>(i + 1, 50));
    lc << curve[i].update << ',' << format_number(curve[i].mean_reward) << ','
       << format_number(smooth) << ',' << format_number(curve[i].mean_len) << ','
       << format_number(curve[i].mean_stop_entropy) << '\n';
  }
  write_text(run_dir / "plot_learning_curve.csv", lc.str());

  const auto rows = read_csv(success_path, "strategy,statements,success");
  std::ostringstream sc;
  sc << "strategy,statements,success\n";
  for (const auto& r : rows) {
    if (r.size() != 3) throw LoadError("success_curve.csv: expected 3 fields");
    const double k = to_double(r[1], success_path), v = to_double(r[2], success_path);
    if (!(v >= 0.0 && v <= 1.0)) throw LoadError("success_curve.csv: rate outside [0, 1]");
    sc << r[0] << ',' << format_number(k) << ',' << format_number(v) << '\n';
  }
  write_text(run_dir / "plot_success_curve.csv", sc.str());
}

std::vector<std::string> play(const ExperimentConfig& config, const Parameters& params,
                              std::istream& in, std::ostream& out,
                              const std::filesystem::path& transcript_path) {
  config.validate();
  std::vector<std::string> transcript;
  auto say = [&](const std::string& line) {
    out << line << '\n';
    transcript.push_back(line);
  };
  auto flush = [&] {
    if (transcript_path.empty()) return;
    std::string text;
    for (const auto& l : transcript) text += l + '\n';
    write_text(transcript_path, text);
  };
  // Returns nullopt on quit or end of input.
  auto ask = [&](const std::string& prompt) -> std::optional<std::string> {
    out << prompt << std::flush;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    line = trim(line);
    if (line == "quit") return std::nullopt;
    transcript.push_back("> " + line);
    return line;
  };

  const auto env = make_environment(config);
  const Vocabulary& vocab = env->vocabulary();
  if (params.vocab_size() != vocab.size()) throw ConfigError("play: checkpoint vocabulary mismatch");
  const DecoderConfig& dec = config.eval.decoder;
  const EnsembleConfig ens = eval_ensemble(dec, config.trainer.ensemble);
  Rng rng = make_rng(config.seed, {0x706c6179});

  if (config.env == EnvKind::kGuessWhich) {
    const auto& gc = config.guesswhich;
    const GameInstance game = generate_game(gc.num_objects, gc.schema, rng);
    say("objects:");
    for (int i = 0; i < game.num_objects(); ++i) {
      std::string desc = "  " + std::to_string(i) + ":";
      for (int a = 0; a < gc.schema.num_attributes(); ++a) {
        desc += " " + gc.schema.attributes[static_cast<std::size_t>(a)]
                          .values[static_cast<std::size_t>(game.objects[static_cast<std::size_t>(i)]
                                                               [static_cast<std::size_t>(a)])];
      }
      say(desc);
    }
    say("pick one object and answer yes, no or na; quit ends the session");
    QuestionGrammar grammar(vocab, gc.schema, gc.agent_stop);
    GuesserPosterior posterior = init_posterior(game.num_objects());
    DialogueHistory history;
    DecoderConfig d = dec;
    d.max_statement_len = gc.max_statement_len;
    std::int64_t emitted = 0;
    for (int round = 0; round < gc.max_rounds; ++round) {
      if (should_stop(posterior, config.eval.stopping)) break;
      std::vector<TokenId> context{vocab.stop()};
      const auto past = history.context();
      context.insert(context.end(), past.begin(), past.end());
      const auto decoded = decode_statement(context, params, d, ens,
                                            gc.constrained ? &grammar : nullptr, vocab.stop(),
                                            vocab.stop_dialogue(), emitted, rng);
      emitted += static_cast<std::int64_t>(decoded.tokens.size());
      print_steps(out, vocab, decoded);
      say("agent: " + join(vocab, decoded.tokens));
      if (!decoded.tokens.empty() && decoded.tokens.back() == vocab.stop_dialogue()) break;
      const auto question = parse_question(decoded.tokens, vocab, gc.schema);
      Answer a = Answer::kNA;
      if (!question) {
        say("(not a question, answered na)");
      } else {
        for (;;) {
          const auto reply = ask("you> ");
          if (!reply) {
            flush();
            return transcript;
          }
          if (*reply == "yes") a = Answer::kYes;
          else if (*reply == "no") a = Answer::kNo;
          else if (*reply == "na") a = Answer::kNA;
          else {
            out << "please answer yes, no, na or quit\n";
            continue;
          }
          break;
        }
      }
      try {
        posterior = observe(posterior, game, question, a, gc.epsilon);
      } catch (const DegenerateEvidenceError&) {
        say("(answers contradict every object; starting over)");
        posterior = init_posterior(game.num_objects());
      }
      history.rounds.push_back({decoded.tokens, answer_token(vocab, a)});
    }
    say("agent guesses object " + std::to_string(guess(posterior)));
  } else {
    const NegotiationSetup setup = sample_values(rng);
    say("items (count, your value): book=(" + std::to_string(setup.counts[0]) + ", " +
        std::to_string(setup.values_b[0]) + ") hat=(" + std::to_string(setup.counts[1]) + ", " +
        std::to_string(setup.values_b[1]) + ") ball=(" + std::to_string(setup.counts[2]) + ", " +
        std::to_string(setup.values_b[2]) + ")");
    say("type 'propose book N hat N ball N' (what you keep), 'agree' or quit");
    PolicyNegotiator agent(vocab, params, dec, ens, config.negotiation.constrained);
    NegotiationState state = NegotiationState::initial(Agent::kA, config.negotiation.max_turns);
    while (!state.terminal) {
      if (state.to_act == Agent::kA) {
        Utterance u = agent.act(setup, state, Agent::kA, rng);
        say("agent: " + join(vocab, u.tokens));
        state = step(state, setup, Agent::kA, u.action, std::move(u.tokens));
        continue;
      }
      for (;;) {
        const auto reply = ask("you> ");
        if (!reply) {
          flush();
          return transcript;
        }
        std::vector<TokenId> tokens;
        try {
          tokens = vocab.encode(*reply);
        } catch (const ConfigError&) {
          out << "unknown word; try again\n";
          continue;
        }
        const Action a = parse_utterance(tokens, vocab, setup, state, Agent::kB);
        if (a.kind == Action::Kind::kInvalid) {
          out << "not a valid move here; try again\n";
          continue;
        }
        state = step(state, setup, Agent::kB, a, std::move(tokens));
        break;
      }
    }
    const DealOutcome& o = *state.outcome;
    say(o.agreed ? "deal: agent " + std::to_string(o.points_a) + " points, you " +
                       std::to_string(o.points_b) + " points"
                 : "no deal: 0 points each");
  }
  flush();
  return transcript;
}

}  // namespace infoseek
