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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance <path to the infoseek CLI> [criteria...]
// where the optional criteria list (e.g. "1 4 12") restricts the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "infoseek/experiment.hpp"

using namespace infoseek;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += fmt(" %.3f", x);
  return s;
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

// Shared training setup for the learning criteria.
ExperimentConfig trained_config(EnvKind env) {
  ExperimentConfig c;
  c.env = env;
  c.model.embed_dim = 16;
  c.model.hidden_dim = 32;
  c.model.init_scale = 1.0;
  c.trainer.learning_rate = 0.1;
  c.trainer.total_updates = 1000;
  c.trainer.episodes_per_update = 8;
  c.trainer.ensemble.samples = 10;
  c.trainer.ensemble.dropout_rate = 0.5;
  c.trainer.ensemble.tau = 100.0;
  c.trainer.decoder.strategy = Strategy::kUcb;
  c.trainer.decoder.beta = BetaSchedule::constant(1.0);
  c.eval.decoder = c.trainer.decoder;
  c.eval.episodes = 1000;
  c.out.clear();
  return c;
}

Parameters random_net(Rng& rng, Eigen::Index vocab, Eigen::Index embed, Eigen::Index hidden,
                      double scale) {
  return Parameters::uniform(vocab, embed, hidden, rng, scale);
}

std::vector<TokenId> random_context(Rng& rng, Eigen::Index vocab, int min_len, int max_len) {
  const int len = min_len + static_cast<int>(uniform_index(rng, max_len - min_len + 1));
  std::vector<TokenId> ctx(static_cast<std::size_t>(len));
  for (auto& t : ctx) t = static_cast<TokenId>(uniform_index(rng, static_cast<std::uint64_t>(vocab)));
  return ctx;
}

// Runs in extended precision: entries whose true value is near 1e-9 are
// otherwise dominated by cancellation in the double central difference.
Outcome gradient_check() {
  using Ext = long double;
  Rng rng(101);
  Ext worst = 0;
  const int nets = 24;
  for (int n = 0; n < nets; ++n) {
    const auto vocab = static_cast<Eigen::Index>(4 + uniform_index(rng, 29));   // 4..32
    const auto hidden = static_cast<Eigen::Index>(2 + uniform_index(rng, 15));  // 2..16
    const auto embed = static_cast<Eigen::Index>(2 + uniform_index(rng, 7));
    const auto p = PolicyParameters<Ext>::uniform(vocab, embed, hidden, rng, Ext(0.5));
    const auto mask = DropoutMask<Ext>::sample(hidden, 0.5, rng);
    TokenFilter filter = TokenFilter::Constant(vocab, true);
    filter(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(vocab)))) = false;
    std::vector<std::vector<TokenId>> contexts;
    for (int s = 0; s < 3; ++s) contexts.push_back(random_context(rng, vocab, 0, 6));
    std::vector<ScoredStep<Ext>> steps;
    for (int s = 0; s < 3; ++s) {
      TokenId tok;
      do {
        tok = static_cast<TokenId>(uniform_index(rng, static_cast<std::uint64_t>(vocab)));
      } while (s == 1 && !filter(tok));
      steps.push_back({contexts[static_cast<std::size_t>(s)], tok, s == 2 ? nullptr : &mask,
                       static_cast<Ext>(2.0 * uniform01(rng) - 1.0), s == 1 ? &filter : nullptr});
    }
    worst = std::max(worst, finite_diff_check<Ext>(p, steps, Ext(1e-5), rng, p.parameter_count()));
  }
  return {worst <= Ext(1e-4),
          fmt("worst relative error %.2Le (limit 1e-4), every parameter of %d nets", worst, nets)};
}

Outcome chebyshev_coverage() {
  Rng rng(202);
  const Parameters p = random_net(rng, 24, 8, 16, 1.0);
  EnsembleConfig cfg;  // N = 10, rate 0.5, tau 100
  std::vector<std::vector<TokenId>> probes;
  for (int i = 0; i < 1000; ++i) probes.push_back(random_context(rng, 24, 1, 8));
  bool ok = true;
  std::string detail;
  for (double beta : {2.0, 3.0}) {
    const double got = coverage_check<double>(p, cfg, probes, beta, rng);
    const double need = chebyshev_lower_bound(beta) - 0.02;
    ok = ok && got >= need;
    detail += fmt("beta=%g coverage %.4f (need >= %.4f); ", beta, got, need);
  }
  return {ok, detail + "1000 probes"};
}

Outcome variance_floor() {
  ExperimentConfig c = trained_config(EnvKind::kGuessWhich);
  c.set_seed(1);
  const TrainResult r = run_training(c, false);
  return {r.floor_violations == 0 && r.moments_computed > 0,
          fmt("%lld violations in %lld moment computations (1000-update GuessWhich run)",
              static_cast<long long>(r.floor_violations),
              static_cast<long long>(r.moments_computed))};
}

Outcome ucb_limit() {
  Rng rng(404);
  int match = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto n = static_cast<Eigen::Index>(2 + uniform_index(rng, 30));
    Moments m;
    m.mean.resize(n);
    m.variance.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      // Coarse grid so that ties occur.
      m.mean(k) = static_cast<double>(uniform_index(rng, 6)) - 2.0;
      m.variance(k) = 0.01 + uniform01(rng);
    }
    m.std = m.variance.sqrt();
    match += select_ucb(m, 0.0) == select_greedy(m);
  }
  return {match == trials, fmt("%d/%d identical choices", match, trials)};
}

Outcome regret_bound() {
  Rng rng(505);
  const double beta = 3.0;
  const Parameters p = random_net(rng, 16, 8, 16, 1.0);
  EnsembleConfig cfg;
  RegretLedger ledger;
  const int rounds = 5000;
  for (int t = 0; t < rounds; ++t) {
    const auto ctx = random_context(rng, 16, 1, 8);
    // Oracle reward: an independent posterior draw of the scorer.
    const Mask truth = Mask::sample(16, cfg.dropout_rate, rng);
    const Eigen::VectorXd oracle = context_scores<double>(ctx, p, &truth);
    const Moments m = posterior_moments(draw_ensemble<double>(ctx, p, cfg, rng), cfg.tau);
    ledger = regret_record(std::move(ledger), oracle, select_ucb(m, beta), m, beta);
  }
  int held = 0;
  for (const auto& e : ledger.entries) held += e.regret <= e.bound;
  const double frac = static_cast<double>(held) / rounds;
  const double need = chebyshev_lower_bound(beta) - 0.02;
  return {frac >= need, fmt("bound held in %.4f of %d rounds at beta=3 (need >= %.4f); "
                            "cumulative regret %.1f vs bound %.1f",
                            frac, rounds, need, ledger.cumulative_regret,
                            ledger.cumulative_bound)};
}

Outcome guesser_oracle() {
  Rng rng(606);
  const Schema schema = Schema::standard();
  double worst = 0.0;
  const int games = 500;
  for (int g = 0; g < games; ++g) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 5));  // 2..6
    const GameInstance game = generate_game(n, schema, rng);
    GuesserPosterior post = init_posterior(n);
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    for (int q = 0; q < 6; ++q) {
      Predicate pred;
      pred.attribute = static_cast<int>(uniform_index(rng, schema.attributes.size()));
      pred.value = static_cast<int>(
          uniform_index(rng, schema.attributes[static_cast<std::size_t>(pred.attribute)].values.size()));
      const bool truth = satisfies(game.objects[static_cast<std::size_t>(game.target)], pred);
      post = observe(post, game, pred, truth ? Answer::kYes : Answer::kNo, 0.0);
      int count = 0;
      for (int i = 0; i < n; ++i) {
        auto& a = alive[static_cast<std::size_t>(i)];
        a = a && satisfies(game.objects[static_cast<std::size_t>(i)], pred) == truth;
        count += a;
      }
      for (int i = 0; i < n; ++i) {
        const double expect = alive[static_cast<std::size_t>(i)] ? 1.0 / count : 0.0;
        worst = std::max(worst, std::abs(post.probs(i) - expect));
      }
    }
  }
  return {worst <= 1e-12,
          fmt("max |posterior - brute force| = %.2e over %d games (limit 1e-12)", worst, games)};
}

Outcome negotiation_constraints() {
  Rng rng(707);
  int bad = 0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    const NegotiationSetup s = sample_values(rng);
    int total = 0, sum_a = 0, sum_b = 0;
    bool each = true, shared = false;
    for (int k = 0; k < kItemTypes; ++k) {
      total += s.counts[k];
      sum_a += s.counts[k] * s.values_a[k];
      sum_b += s.counts[k] * s.values_b[k];
      each = each && (s.values_a[k] > 0 || s.values_b[k] > 0) && s.counts[k] >= 1;
      shared = shared || (s.values_a[k] > 0 && s.values_b[k] > 0);
    }
    bad += !(total >= 5 && total <= 7 && sum_a == 10 && sum_b == 10 && each && shared &&
             is_valid_setup(s));
  }
  const NegotiationSetup printed{{2, 2, 1}, {0, 5, 0}, {2, 2, 2}};
  const DealOutcome deal = settle(printed, {2, 2, 0}, Agent::kB);
  const bool ok = bad == 0 && is_valid_setup(printed) && deal.agreed && deal.points_a == 10 &&
                  deal.points_b == 2;
  return {ok, fmt("%d/%d invalid samples; printed setup valid=%d, outcome %d/%d (expect 10/2)",
                  bad, samples, is_valid_setup(printed), deal.points_a, deal.points_b)};
}

Outcome stopping_order() {
  const ExperimentConfig c = trained_config(EnvKind::kGuessWhich);
  const auto rows = sweep_eta(c, {0.05, 0.01, std::nan("")}, kSeeds);
  const double l05 = rows[0].statements_mean, l01 = rows[1].statements_mean,
               lnone = rows[2].statements_mean;
  const double s05 = rows[0].success_mean, snone = rows[2].success_mean;
  const bool ok = l05 <= l01 && l01 <= lnone && l05 < lnone && std::abs(s05 - snone) <= 0.05;
  return {ok, fmt("statements %.3f <= %.3f <= %.3f (outer strict); success %.3f vs %.3f "
                  "(within 0.05)",
                  l05, l01, lnone, s05, snone)};
}

Outcome training_effect() {
  ExperimentConfig base = trained_config(EnvKind::kGuessWhich);
  const EvaluationSuite suite = make_suite(base);
  auto run = [&](Strategy s) {
    std::vector<double> out;
    for (auto seed : kSeeds) {
      ExperimentConfig c = base;
      c.set_seed(seed);
      c.trainer.decoder.strategy = s;
      c.eval.decoder = c.trainer.decoder;
      const TrainResult r = run_training(c, false);
      out.push_back(evaluate(r.params, c, {c.eval.decoder}, suite).rows.front().success_rate);
    }
    return out;
  };
  const auto ucb = run(Strategy::kUcb), greedy = run(Strategy::kGreedy);
  const double mu = mean(ucb), mg = mean(greedy), floor = 1.0 / 8.0 + 0.25;
  const bool ok = mu - mg >= 0.03 && mu >= floor && mg >= floor;
  return {ok, fmt("ucb %.3f [%s ] vs greedy %.3f [%s ]; need gap >= 0.03, both >= %.3f", mu,
                  list(ucb).c_str(), mg, list(greedy).c_str(), floor)};
}

Outcome beta_sweep() {
  const ExperimentConfig c = trained_config(EnvKind::kNegotiation);
  const auto rows = sweep_beta(c, {0.0, 1.0, 10.0, 1000.0}, kSeeds);
  const double b0 = rows[0].points_mean, b1 = rows[1].points_mean, b10 = rows[2].points_mean,
               b1000 = rows[3].points_mean;
  const double best = std::max(b1, b10);
  const bool ok = best > b0 && b1000 <= best;
  return {ok, fmt("mean points beta=0 %.3f, 1 %.3f, 10 %.3f, 1000 %.3f; need max(1,10) > 0 "
                  "and 1000 <= max(1,10)",
                  b0, b1, b10, b1000)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "infoseek_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  int compared = 0;
  std::vector<std::string> diffs;
  for (const char* env : {"guesswhich", "negotiation"}) {
    ExperimentConfig c = trained_config(parse_env(env));
    c.model.hidden_dim = 16;
    c.trainer.total_updates = 40;
    c.eval.episodes = 200;
    const fs::path cfg = root / (std::string(env) + ".json");
    std::ofstream(cfg) << config_to_json(c);
    for (const char* run : {"a", "b"}) {
      const fs::path out = root / env / run;
      const std::string common =
          " --config '" + cfg.string() + "' --seed 11 --out '" + out.string() + "' > /dev/null";
      const std::string train = "'" + cli + "' train" + common;
      const std::string eval = "'" + cli + "' evaluate --strategy greedy,ucb,sample,beam" + common;
      if (std::system(train.c_str()) != 0 || std::system(eval.c_str()) != 0) {
        return {false, std::string("CLI invocation failed for ") + env};
      }
    }
    for (const char* file : {"learning_curve.csv", "evaluation.csv", "success_curve.csv"}) {
      const fs::path a = root / env / "a" / file, b = root / env / "b" / file;
      ++compared;
      if (!fs::exists(a) || slurp(a) != slurp(b)) diffs.push_back(std::string(env) + "/" + file);
    }
  }
  std::string detail = fmt("%d CSV pairs compared", compared);
  for (const auto& d : diffs) detail += ", differs: " + d;
  return {diffs.empty(), detail};
}

Outcome beam_sanity() {
  int episodes = 0, mismatched = 0;
  for (EnvKind kind : {EnvKind::kGuessWhich, EnvKind::kNegotiation}) {
    const ExperimentConfig c = trained_config(kind);
    const auto env = make_environment(c);
    const EvaluationSuite suite = make_suite(c);
    for (std::uint64_t net = 0; net < 2; ++net) {
      ExperimentConfig nc = c;
      nc.set_seed(net + 1);
      const Parameters p = initial_parameters(nc, env->vocabulary());
      DecoderConfig greedy, beam;
      greedy.strategy = Strategy::kGreedy;
      beam.strategy = Strategy::kBeam;
      beam.beam_width = 1;
      EnsembleConfig plain;
      plain.samples = 1;
      plain.dropout_rate = 0.0;
      for (std::size_t i = 0; i < suite.size(); ++i) {
        Rng ra(i), rb(i);
        Trajectory ta, tb;
        if (kind == EnvKind::kGuessWhich) {
          const auto& gw = dynamic_cast<const GuessWhichEnvironment&>(*env);
          ta = gw.play(suite.games[i], p, greedy, plain, std::nullopt, ra);
          tb = gw.play(suite.games[i], p, beam, plain, std::nullopt, rb);
        } else {
          const auto& ng = dynamic_cast<const NegotiationEnvironment&>(*env);
          const Agent first = i % 2 == 0 ? Agent::kA : Agent::kB;
          ta = ng.play(suite.setups[i], first, p, greedy, plain, ra);
          tb = ng.play(suite.setups[i], first, p, beam, plain, rb);
        }
        ++episodes;
        mismatched += !(ta.transcript == tb.transcript && ta.reward == tb.reward);
      }
    }
  }

  // Width |V|^M on the four-token toy against enumeration of all 64 strings.
  Rng rng(1212);
  int toy_bad = 0;
  const int toys = 100;
  for (int trial = 0; trial < toys; ++trial) {
    const Parameters p = random_net(rng, 4, 3, 5, 1.5);
    const std::vector<TokenId> ctx = random_context(rng, 4, 1, 3);
    auto logp = [&](const std::vector<TokenId>& prefix) {
      std::vector<TokenId> all = ctx;
      all.insert(all.end(), prefix.begin(), prefix.end());
      return log_softmax(context_scores<double>(all, p));
    };
    std::vector<TokenId> best_seq;
    double best = -INFINITY;
    for (int code = 0; code < 64; ++code) {
      const TokenId s[3] = {code / 16, (code / 4) % 4, code % 4};
      std::vector<TokenId> seq;
      double lp = 0.0;
      for (TokenId t : s) {
        lp += logp(seq)(t);
        seq.push_back(t);
        if (t <= 1) break;
      }
      if (seq.back() <= 1 && lp > best) {
        best = lp;
        best_seq = seq;
      }
    }
    DecoderConfig cfg;
    cfg.beam_width = 64;
    cfg.max_statement_len = 3;
    const BeamResult r = select_beam(ctx, p, cfg, 0, 1);
    toy_bad += !(r.finished && r.tokens == best_seq && r.log_prob == best);
  }
  return {mismatched == 0 && toy_bad == 0,
          fmt("K=1 vs greedy: %d/%d episodes differ; exhaustive toy: %d/%d differ", mismatched,
              episodes, toy_bad, toys)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <infoseek-cli> [criterion numbers...]\n");
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient correctness", 30, gradient_check},
      {2, "chebyshev coverage", 60, chebyshev_coverage},
      {3, "variance floor", 0, variance_floor},
      {4, "ucb limit", 0, ucb_limit},
      {5, "regret bound", 60, regret_bound},
      {6, "guesser oracle", 0, guesser_oracle},
      {7, "negotiation constraints", 0, negotiation_constraints},
      {8, "stopping ordering", 600, stopping_order},
      {9, "training effect", 1800, training_effect},
      {10, "beta sweep ordering", 1800, beta_sweep},
      {11, "determinism", 0, [&] { return cli_determinism(cli); }},
      {12, "beam sanity", 0, beam_sanity},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt("; runtime over the %.0f s limit", c.limit_s);
    }
    failed += !o.pass;
    std::printf("[%s] %2d %-24s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
