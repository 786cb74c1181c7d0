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

// REINFORCE self-play: episodes played with the configured decoder, a
// terminal reward broadcast backwards with discount, a running-average
// baseline, and plain SGD on the averaged policy gradient.

#ifndef INFOSEEK_TRAINER_HPP_
#define INFOSEEK_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "infoseek/decoder.hpp"
#include "infoseek/diffnet.hpp"
#include "infoseek/ensemble.hpp"
#include "infoseek/guesser.hpp"
#include "infoseek/guesswhich.hpp"
#include "infoseek/negotiation.hpp"
#include "infoseek/random.hpp"
#include "infoseek/vocabulary.hpp"

namespace infoseek {

struct TrainerConfig {
  double gamma = 0.99;
  double learning_rate = 0.1;
  double baseline_decay = 0.9;
  int episodes_per_update = 8;
  int total_updates = 0;
  // Rescale the averaged gradient to at most this norm; 0 disables.
  double max_grad_norm = 0.0;
  DecoderConfig decoder;
  EnsembleConfig ensemble;
  std::optional<StoppingRule> stopping;
  std::uint64_t seed = 0;
  // Episode workers per update; 0 reads INFOSEEK_THREADS (default 1).
  int threads = 0;

  void validate() const;
};

// One scored decision of the learner.
struct TrajectoryStep {
  std::vector<TokenId> context;  // scorer input when the token was chosen
  TokenId token = 0;
  Mask mask;
  TokenFilter filter;
  double log_prob = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double reward = 0.0;          // in [0, 1]
  int statements = 0;           // answered questions or learner utterances
  int tokens = 0;               // all emitted tokens, forced ones included
  bool success = false;         // GuessWhich: correct guess; negotiation: deal reached
  bool stopped_by_rule = false;
  double stop_entropy = std::numeric_limits<double>::quiet_NaN();
  double points = std::numeric_limits<double>::quiet_NaN();  // negotiation only
  std::int64_t moments_computed = 0;
  std::int64_t floor_violations = 0;
  std::vector<std::vector<TokenId>> transcript;  // every utterance, both sides
};

// Source of training and evaluation episodes.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const Vocabulary& vocabulary() const = 0;
  // Upper bound on the learner's emitted tokens per episode.
  virtual int max_episode_tokens() const = 0;
  // Draws a fresh instance from `rng` and plays it.
  virtual Trajectory run_episode(const Parameters& params, const DecoderConfig& decoder,
                                 const EnsembleConfig& ensemble,
                                 const std::optional<StoppingRule>& stopping, Rng& rng) const = 0;
};

class GuessWhichEnvironment final : public Environment {
 public:
  explicit GuessWhichEnvironment(GuessWhichConfig config);
  GuessWhichEnvironment(const GuessWhichEnvironment&) = delete;
  GuessWhichEnvironment& operator=(const GuessWhichEnvironment&) = delete;

  const Vocabulary& vocabulary() const override { return vocab_; }
  int max_episode_tokens() const override;
  Trajectory run_episode(const Parameters& params, const DecoderConfig& decoder,
                         const EnsembleConfig& ensemble,
                         const std::optional<StoppingRule>& stopping, Rng& rng) const override;

  // Plays one given game. Stopping is checked before each statement; a
  // statement that is not a well-formed question is answered NA.
  Trajectory play(const GameInstance& game, const Parameters& params,
                  const DecoderConfig& decoder, const EnsembleConfig& ensemble,
                  const std::optional<StoppingRule>& stopping, Rng& rng) const;

  const GuessWhichConfig& config() const { return config_; }

 private:
  GuessWhichConfig config_;
  Vocabulary vocab_;
  std::unique_ptr<QuestionGrammar> grammar_;
};

// The learner is agent A; the counterpart is the scripted negotiator.
class NegotiationEnvironment final : public Environment {
 public:
  explicit NegotiationEnvironment(NegotiationConfig config);

  const Vocabulary& vocabulary() const override { return vocab_; }
  int max_episode_tokens() const override;
  Trajectory run_episode(const Parameters& params, const DecoderConfig& decoder,
                         const EnsembleConfig& ensemble,
                         const std::optional<StoppingRule>& stopping, Rng& rng) const override;

  Trajectory play(const NegotiationSetup& setup, Agent first, const Parameters& params,
                  const DecoderConfig& decoder, const EnsembleConfig& ensemble, Rng& rng) const;

  const NegotiationConfig& config() const { return config_; }

 private:
  NegotiationConfig config_;
  Vocabulary vocab_;
};

// Step t of T (1-based) gets gamma^(T-t) * reward - baseline.
std::vector<double> discounted_advantages(const Trajectory& trajectory, double gamma,
                                          double baseline);

// b' = decay * b + (1 - decay) * reward; decay in [0, 1).
double update_baseline(double baseline, double reward, double decay);

struct UpdateResult {
  Parameters params;
  double grad_norm = 0.0;
  double mean_reward = 0.0;
  bool applied = false;  // false: zero or non-finite gradient, params untouched
  bool non_finite = false;
};

// Averaged policy gradient of the batch, one SGD ascent step.
UpdateResult reinforce_update(const Parameters& params, std::span<const Trajectory> batch,
                              const TrainerConfig& config, double baseline);

// Gradient only (batch average), for diagnostics.
Parameters policy_gradient(const Parameters& params, std::span<const Trajectory> batch,
                           double gamma, double baseline);

struct CurveRow {
  int update = 0;
  double mean_reward = 0.0;
  double mean_len = 0.0;
  double mean_stop_entropy = std::numeric_limits<double>::quiet_NaN();
  double cum_regret = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = 0.0;
};

void write_learning_curve(std::ostream& out, std::span<const CurveRow> rows);
std::vector<CurveRow> read_learning_curve(std::istream& in);

struct TrainResult {
  Parameters params;
  std::vector<CurveRow> curve;
  double baseline = 0.0;
  std::int64_t moments_computed = 0;
  std::int64_t floor_violations = 0;
  std::int64_t max_episode_tokens_seen = 0;
  int skipped_updates = 0;  // non-finite gradients
};

struct TrainHooks {
  // Called after update u (1-based) when checkpoint_interval divides u.
  int checkpoint_interval = 0;
  std::function<void(int update, const Parameters&)> on_checkpoint;
  std::function<void(const CurveRow&)> on_update;
};

// Episodes of update u use generators derived from (seed, u, episode).
TrainResult train(const TrainerConfig& config, const Environment& env, Parameters initial,
                  const TrainHooks& hooks = {});

// Worker count from INFOSEEK_THREADS, at least 1.
int configured_threads();

// Runs f(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace infoseek

#endif  // INFOSEEK_TRAINER_HPP_
