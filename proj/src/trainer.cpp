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

#include "infoseek/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "infoseek/errors.hpp"
#include "infoseek/format.hpp"

namespace infoseek {

void TrainerConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("trainer: gamma must lie in (0, 1]");
  if (!(learning_rate > 0.0)) throw ConfigError("trainer: learning_rate must be positive");
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0)) {
    throw ConfigError("trainer: baseline_decay must lie in [0, 1)");
  }
  if (episodes_per_update < 1) throw ConfigError("trainer: episodes_per_update must be >= 1");
  if (total_updates < 0) throw ConfigError("trainer: total_updates must be >= 0");
  if (!(max_grad_norm >= 0.0)) throw ConfigError("trainer: max_grad_norm must be >= 0");
  if (stopping && !(stopping->eta >= 0.0)) throw ConfigError("trainer: eta must be >= 0");
  if (threads < 0) throw ConfigError("trainer: threads must be >= 0");
  decoder.validate();
  ensemble.validate();
}

namespace {

void append_steps(Trajectory& traj, std::span<const TokenId> context,
                  DecodedStatement& decoded) {
  for (auto& s : decoded.steps) {
    TrajectoryStep step;
    step.context.assign(context.begin(), context.end());
    step.context.insert(step.context.end(), decoded.tokens.begin(),
                        decoded.tokens.begin() +
                            static_cast<std::ptrdiff_t>(s.prefix_len - context.size()));
    step.token = s.token;
    step.mask = std::move(s.mask);
    step.filter = std::move(s.filter);
    step.log_prob = s.log_prob;
    traj.steps.push_back(std::move(step));
  }
  traj.tokens += static_cast<int>(decoded.tokens.size());
  traj.moments_computed += decoded.moments_computed;
  traj.floor_violations += decoded.floor_violations;
}

}  // namespace

GuessWhichEnvironment::GuessWhichEnvironment(GuessWhichConfig config)
    : config_(std::move(config)), vocab_(guesswhich_vocabulary(config_.schema)) {
  config_.validate();
  grammar_ = std::make_unique<QuestionGrammar>(vocab_, config_.schema, config_.agent_stop);
}

int GuessWhichEnvironment::max_episode_tokens() const {
  return config_.max_statement_len * config_.max_rounds;
}

Trajectory GuessWhichEnvironment::run_episode(const Parameters& params,
                                              const DecoderConfig& decoder,
                                              const EnsembleConfig& ensemble,
                                              const std::optional<StoppingRule>& stopping,
                                              Rng& rng) const {
  const GameInstance game = generate_game(config_.num_objects, config_.schema, rng);
  return play(game, params, decoder, ensemble, stopping, rng);
}

Trajectory GuessWhichEnvironment::play(const GameInstance& game, const Parameters& params,
                                       const DecoderConfig& decoder,
                                       const EnsembleConfig& ensemble,
                                       const std::optional<StoppingRule>& stopping,
                                       Rng& rng) const {
  if (params.vocab_size() != vocab_.size()) {
    throw ConfigError("guesswhich: parameters do not match the vocabulary");
  }
  DecoderConfig dec = decoder;
  dec.max_statement_len = config_.max_statement_len;
  Trajectory traj;
  GuesserPosterior posterior = init_posterior(game.num_objects());
  DialogueHistory history;
  history.max_statement_len = config_.max_statement_len;
  history.max_rounds = config_.max_rounds;
  const StatementGrammar* grammar = config_.constrained ? grammar_.get() : nullptr;

  for (int round = 0; round < config_.max_rounds; ++round) {
    if (should_stop(posterior, stopping)) {
      traj.stopped_by_rule = true;
      break;
    }
    // A leading boundary marker gives the first decision a non-zero state,
    // so the dropout ensemble can disagree about it.
    std::vector<TokenId> context{vocab_.stop()};
    const std::vector<TokenId> past = history.context();
    context.insert(context.end(), past.begin(), past.end());
    DecodedStatement decoded = decode_statement(context, params, dec, ensemble, grammar,
                                                vocab_.stop(), vocab_.stop_dialogue(),
                                                traj.tokens, rng);
    append_steps(traj, context, decoded);
    traj.transcript.push_back(decoded.tokens);
    if (!decoded.tokens.empty() && decoded.tokens.back() == vocab_.stop_dialogue()) break;

    const auto question = parse_question(decoded.tokens, vocab_, config_.schema);
    const Answer a = answer(game, question, config_.epsilon, rng);
    try {
      posterior = observe(posterior, game, question, a, config_.epsilon);
    } catch (const DegenerateEvidenceError&) {
      posterior = init_posterior(game.num_objects());
    }
    history.rounds.push_back({decoded.tokens, answer_token(vocab_, a)});
    traj.transcript.push_back({answer_token(vocab_, a)});
    ++traj.statements;
  }

  traj.stop_entropy = entropy(posterior);
  traj.success = reward(static_cast<int>(guess(posterior)), game.target) == 1;
  traj.reward = traj.success ? 1.0 : 0.0;
  return traj;
}

NegotiationEnvironment::NegotiationEnvironment(NegotiationConfig config)
    : config_(config), vocab_(negotiation_vocabulary()) {
  config_.validate();
}

int NegotiationEnvironment::max_episode_tokens() const {
  return kProposalLength * ((config_.max_turns + 1) / 2);
}

Trajectory NegotiationEnvironment::run_episode(const Parameters& params,
                                               const DecoderConfig& decoder,
                                               const EnsembleConfig& ensemble,
                                               const std::optional<StoppingRule>&,
                                               Rng& rng) const {
  const NegotiationSetup setup = sample_values(rng);
  const Agent first = uniform01(rng) < 0.5 ? Agent::kA : Agent::kB;
  return play(setup, first, params, decoder, ensemble, rng);
}

Trajectory NegotiationEnvironment::play(const NegotiationSetup& setup, Agent first,
                                        const Parameters& params, const DecoderConfig& decoder,
                                        const EnsembleConfig& ensemble, Rng& rng) const {
  if (params.vocab_size() != vocab_.size()) {
    throw ConfigError("negotiation: parameters do not match the vocabulary");
  }
  DecoderConfig dec = decoder;
  dec.max_statement_len = kProposalLength;
  ScriptedNegotiator opponent(vocab_, config_.opponent_threshold);
  Trajectory traj;
  NegotiationState state = NegotiationState::initial(first, config_.max_turns);
  while (!state.terminal) {
    if (state.to_act == Agent::kB) {
      Utterance u = opponent.act(setup, state, Agent::kB, rng);
      traj.transcript.push_back(u.tokens);
      state = step(state, setup, Agent::kB, u.action, std::move(u.tokens));
      continue;
    }
    const std::vector<TokenId> context = negotiation_context(vocab_, setup, state, Agent::kA);
    ProposalGrammar grammar(vocab_, setup.counts, state.can_agree(Agent::kA));
    DecodedStatement decoded =
        decode_statement(context, params, dec, ensemble, config_.constrained ? &grammar : nullptr,
                         vocab_.stop(), vocab_.stop_dialogue(), traj.tokens, rng);
    append_steps(traj, context, decoded);
    traj.transcript.push_back(decoded.tokens);
    ++traj.statements;
    const Action action = parse_utterance(decoded.tokens, vocab_, setup, state, Agent::kA);
    state = step(state, setup, Agent::kA, action, std::move(decoded.tokens));
  }
  const DealOutcome& outcome = *state.outcome;
  traj.success = outcome.agreed;
  traj.points = outcome.points_a;
  traj.reward = outcome.points_a / static_cast<double>(kValueTotal);
  return traj;
}

std::vector<double> discounted_advantages(const Trajectory& trajectory, double gamma,
                                          double baseline) {
  const std::size_t n = trajectory.steps.size();
  std::vector<double> w(n);
  double discount = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    w[k] = discount * trajectory.reward - baseline;
    discount *= gamma;
  }
  return w;
}

double update_baseline(double baseline, double reward, double decay) {
  if (!(decay >= 0.0 && decay < 1.0)) throw DomainError("update_baseline: decay must lie in [0, 1)");
  return decay * baseline + (1.0 - decay) * reward;
}

Parameters policy_gradient(const Parameters& params, std::span<const Trajectory> batch,
                           double gamma, double baseline) {
  if (batch.empty()) throw ContractError("policy_gradient: empty batch");
  Parameters grad = Parameters::zeros_like(params);
  for (const auto& traj : batch) {
    if (traj.steps.empty()) continue;
    const auto weights = discounted_advantages(traj, gamma, baseline);
    std::vector<Step> steps;
    steps.reserve(traj.steps.size());
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
      const auto& s = traj.steps[k];
      steps.push_back({s.context, s.token, &s.mask, weights[k], &s.filter});
    }
    for (const auto& s : steps) {
      if (!std::isfinite(s.weight)) throw ContractError("policy_gradient: non-finite weight");
      accumulate_gradient(s, params, grad);
    }
  }
  grad *= 1.0 / static_cast<double>(batch.size());
  return grad;
}

UpdateResult reinforce_update(const Parameters& params, std::span<const Trajectory> batch,
                              const TrainerConfig& config, double baseline) {
  if (batch.empty()) throw ContractError("reinforce_update: empty batch");
  UpdateResult out;
  out.params = params;
  double total = 0.0;
  for (const auto& t : batch) total += t.reward;
  out.mean_reward = total / static_cast<double>(batch.size());

  Parameters grad = policy_gradient(params, batch, config.gamma, baseline);
  const double sq = grad.squared_norm();
  out.grad_norm = std::sqrt(sq);
  if (!std::isfinite(sq) || !grad.all_finite()) {
    out.non_finite = true;
    return out;
  }
  if (sq == 0.0) return out;
  double step = config.learning_rate;
  if (config.max_grad_norm > 0.0 && out.grad_norm > config.max_grad_norm) {
    step *= config.max_grad_norm / out.grad_norm;
  }
  out.params.add_scaled(grad, step);
  out.applied = true;
  return out;
}

void write_learning_curve(std::ostream& out, std::span<const CurveRow> rows) {
  out << "update,mean_reward,mean_len,mean_stop_entropy,cum_regret,grad_norm\n";
  for (const auto& r : rows) {
    out << r.update << ',' << format_number(r.mean_reward) << ',' << format_number(r.mean_len)
        << ',' << format_number(r.mean_stop_entropy) << ',' << format_number(r.cum_regret) << ','
        << format_number(r.grad_norm) << '\n';
  }
}

std::vector<CurveRow> read_learning_curve(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "update,mean_reward,mean_len,mean_stop_entropy,cum_regret,grad_norm") {
    throw LoadError("learning curve: unexpected header");
  }
  std::vector<CurveRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[6];
    for (auto& x : f) {
      if (!std::getline(ss, x, ',')) {
        throw LoadError("learning curve line " + std::to_string(lineno) + ": expected 6 fields");
      }
    }
    try {
      CurveRow r;
      r.update = std::stoi(f[0]);
      r.mean_reward = std::stod(f[1]);
      r.mean_len = std::stod(f[2]);
      r.mean_stop_entropy = std::stod(f[3]);
      r.cum_regret = std::stod(f[4]);
      r.grad_norm = std::stod(f[5]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw LoadError("learning curve line " + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

int configured_threads() {
  const char* env = std::getenv("INFOSEEK_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return std::max(1, n);
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

TrainResult train(const TrainerConfig& config, const Environment& env, Parameters initial,
                  const TrainHooks& hooks) {
  config.validate();
  initial.check_shapes();
  if (initial.vocab_size() != env.vocabulary().size()) {
    throw ConfigError("train: parameters do not match the environment vocabulary");
  }
  TrainResult result;
  result.params = std::move(initial);
  const int threads = config.threads > 0 ? config.threads : configured_threads();
  const int k = config.episodes_per_update;
  double cum_regret = std::numeric_limits<double>::quiet_NaN();

  for (int u = 1; u <= config.total_updates; ++u) {
    std::vector<Trajectory> batch(static_cast<std::size_t>(k));
    parallel_for(k, threads, [&](int e) {
      Rng rng = make_rng(config.seed, {static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(e)});
      batch[static_cast<std::size_t>(e)] =
          env.run_episode(result.params, config.decoder, config.ensemble, config.stopping, rng);
    });

    CurveRow row;
    row.update = u;
    double len = 0.0, ent = 0.0;
    int ent_count = 0;
    for (const auto& t : batch) {
      len += t.statements;
      if (std::isfinite(t.stop_entropy)) {
        ent += t.stop_entropy;
        ++ent_count;
      }
      result.moments_computed += t.moments_computed;
      result.floor_violations += t.floor_violations;
      result.max_episode_tokens_seen = std::max<std::int64_t>(result.max_episode_tokens_seen, t.tokens);
    }
    row.mean_len = len / k;
    if (ent_count > 0) row.mean_stop_entropy = ent / ent_count;
    row.cum_regret = cum_regret;

    UpdateResult upd = reinforce_update(result.params, batch, config, result.baseline);
    row.mean_reward = upd.mean_reward;
    row.grad_norm = upd.grad_norm;
    if (upd.non_finite) ++result.skipped_updates;
    if (upd.applied) result.params = std::move(upd.params);
    for (const auto& t : batch) {
      result.baseline = update_baseline(result.baseline, t.reward, config.baseline_decay);
    }
    result.curve.push_back(row);
    if (hooks.on_update) hooks.on_update(row);
    if (hooks.checkpoint_interval > 0 && hooks.on_checkpoint &&
        u % hooks.checkpoint_interval == 0) {
      hooks.on_checkpoint(u, result.params);
    }
  }
  return result;
}

}  // namespace infoseek
