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

#ifndef INFOSEEK_DECODER_HPP_
#define INFOSEEK_DECODER_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infoseek/diffnet.hpp"
#include "infoseek/ensemble.hpp"
#include "infoseek/random.hpp"

namespace infoseek {

enum class Strategy { kGreedy, kSample, kBeam, kUcb, kMaxEntropy };

std::string_view to_string(Strategy s);
// Accepts greedy, sample, beam, ucb, max-entropy (or max_entropy).
Strategy parse_strategy(std::string_view name);

// beta_t: a constant, an explicit per-step list (the last entry persists),
// or a linear ramp from `value` to `final_value` over `decay_steps` steps.
struct BetaSchedule {
  double value = 1.0;
  std::vector<double> per_step;
  double final_value = 1.0;
  int decay_steps = 0;

  static BetaSchedule constant(double beta) { return BetaSchedule{beta, {}, beta, 0}; }
  static BetaSchedule linear(double from, double to, int steps) {
    return BetaSchedule{from, {}, to, steps};
  }

  double at(std::int64_t step) const;
  void validate() const;
};

struct DecoderConfig {
  Strategy strategy = Strategy::kUcb;
  BetaSchedule beta = BetaSchedule::constant(1.0);
  int beam_width = 20;
  int max_statement_len = 4;
  // 1: mean + beta * std (default). 2: mean + beta * variance.
  int ucb_exponent = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Lowest index wins ties; only admissible entries compete.
template <typename Derived>
Eigen::Index argmax_admissible(const Eigen::DenseBase<Derived>& values,
                               const TokenFilter* filter = nullptr) {
  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!admits(filter, i)) continue;
    if (best < 0 || values(i) > values(best)) best = i;
  }
  if (best < 0) throw ContractError("selection: no admissible token");
  return best;
}

inline TokenId select_greedy(const Moments& m, const TokenFilter* filter = nullptr) {
  return argmax_admissible(m.mean, filter);
}

// argmax of mean + beta * std (exponent 1) or mean + beta * variance (2).
TokenId select_ucb(const Moments& m, double beta, const TokenFilter* filter = nullptr,
                   int exponent = 1);

// argmax of the variance, i.e. of the Gaussian entropy 0.5 log(2 pi e var).
inline TokenId select_max_entropy(const Moments& m, const TokenFilter* filter = nullptr) {
  return argmax_admissible(m.variance, filter);
}

// Categorical draw. `dist` must sum to 1 within 1e-6.
TokenId select_sample(const Eigen::VectorXd& dist, Rng& rng);

// 0.5 * ln(2 pi e sigma2), in nats.
double token_information(double sigma2);
// Union bound over a statement: sum of per-token information.
double statement_information(std::span<const double> sigma2);

// Describes which statements are well formed. Implemented per environment.
class StatementGrammar {
 public:
  virtual ~StatementGrammar() = default;
  virtual TokenFilter admissible(std::span<const TokenId> statement) const = 0;
  virtual bool is_complete(std::span<const TokenId> statement) const = 0;
};

struct BeamResult {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  bool finished = false;  // false: no hypothesis completed within max_statement_len
};

// Beam search over the dropout-free scorer's log-probabilities. A hypothesis
// completes on <stop>, <stopdialogue>, or when the grammar says so.
BeamResult select_beam(std::span<const TokenId> context, const Parameters& params,
                       const DecoderConfig& config, TokenId stop, TokenId stop_dialogue,
                       const StatementGrammar* grammar = nullptr);

// One sampled position of a statement, kept for the policy gradient. The
// recorded mask is the ensemble member credited with the choice: for
// sampling, the member whose softmax produced the draw; for the argmax
// strategies, the first draw (members are i.i.d., so it is a posterior
// sample independent of which token won).
struct DecodedStep {
  std::size_t prefix_len = 0;  // scorer input = context + statement[0..k)
  TokenId token = 0;
  Mask mask;
  TokenFilter filter;  // empty: unconstrained
  double beta = 0.0;
  double log_prob = 0.0;  // log pi(token) under the recorded mask
  Eigen::ArrayXd mean;  // posterior moments at selection time (empty for beam)
  Eigen::ArrayXd std;
};

struct DecodedStatement {
  std::vector<TokenId> tokens;
  std::vector<DecodedStep> steps;  // positions with more than one admissible token
  std::int64_t moments_computed = 0;
  std::int64_t floor_violations = 0;  // variance < 1/tau, must stay 0
  bool beam_unfinished = false;
};

// Generates one statement after `context`: per position, draw an ensemble,
// take posterior moments and select with the configured strategy. Stops on
// <stop>, <stopdialogue>, a grammar-complete statement, or
// max_statement_len tokens. Positions with a single admissible token are
// emitted without sampling. `beta_step` indexes the beta schedule for the
// first token and advances by one per emitted token.
DecodedStatement decode_statement(std::span<const TokenId> context, const Parameters& params,
                                  const DecoderConfig& decoder, const EnsembleConfig& ensemble,
                                  const StatementGrammar* grammar, TokenId stop,
                                  TokenId stop_dialogue, std::int64_t beta_step, Rng& rng);

struct RegretEntry {
  std::int64_t step = 0;
  TokenId chosen = 0;
  TokenId best = 0;
  double regret = 0.0;
  double bound = 0.0;
};

struct RegretLedger {
  std::vector<RegretEntry> entries;
  double cumulative_regret = 0.0;
  double cumulative_bound = 0.0;

  void write_csv(std::ostream& out) const;
};

// rho_t = max(oracle) - oracle[chosen]; bound 2 beta std(chosen).
RegretLedger regret_record(RegretLedger ledger, const Eigen::VectorXd& oracle_scores,
                           TokenId chosen, const Moments& m, double beta);

}  // namespace infoseek

#endif  // INFOSEEK_DECODER_HPP_
