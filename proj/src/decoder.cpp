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

#include "infoseek/decoder.hpp"

#include <algorithm>
#include <optional>
#include <ostream>

#include "infoseek/errors.hpp"
#include "infoseek/format.hpp"

namespace infoseek {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kSample: return "sample";
    case Strategy::kBeam: return "beam";
    case Strategy::kUcb: return "ucb";
    case Strategy::kMaxEntropy: return "max-entropy";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "greedy") return Strategy::kGreedy;
  if (name == "sample" || name == "sampling") return Strategy::kSample;
  if (name == "beam") return Strategy::kBeam;
  if (name == "ucb") return Strategy::kUcb;
  if (name == "max-entropy" || name == "max_entropy") return Strategy::kMaxEntropy;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

double BetaSchedule::at(std::int64_t step) const {
  if (!per_step.empty()) {
    const auto i = std::clamp<std::int64_t>(step, 0, static_cast<std::int64_t>(per_step.size()) - 1);
    return per_step[static_cast<std::size_t>(i)];
  }
  if (decay_steps > 0) {
    const double frac = std::clamp(static_cast<double>(step) / decay_steps, 0.0, 1.0);
    return value + (final_value - value) * frac;
  }
  return value;
}

void BetaSchedule::validate() const {
  auto bad = [](double b) { return !(b >= 0.0) || !std::isfinite(b); };
  if (bad(value) || bad(final_value) || std::any_of(per_step.begin(), per_step.end(), bad)) {
    throw ConfigError("beta must be finite and >= 0");
  }
  if (decay_steps < 0) throw ConfigError("beta decay_steps must be >= 0");
}

void DecoderConfig::validate() const {
  beta.validate();
  if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
  if (max_statement_len < 1) throw ConfigError("max_statement_len must be >= 1");
  if (ucb_exponent != 1 && ucb_exponent != 2) throw ConfigError("ucb_exponent must be 1 or 2");
}

TokenId select_ucb(const Moments& m, double beta, const TokenFilter* filter, int exponent) {
  if (!(beta >= 0.0)) throw DomainError("select_ucb: beta must be >= 0");
  const Eigen::ArrayXd& spread = exponent == 2 ? m.variance : m.std;
  return argmax_admissible((m.mean + beta * spread).eval(), filter);
}

TokenId select_sample(const Eigen::VectorXd& dist, Rng& rng) {
  if (dist.size() == 0) throw ContractError("select_sample: empty distribution");
  if (std::abs(dist.sum() - 1.0) > 1e-6 || (dist.array() < 0.0).any()) {
    throw ContractError("select_sample: distribution is not normalized");
  }
  const double u = uniform01(rng);
  double acc = 0.0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    if (dist(i) <= 0.0) continue;
    last_positive = i;
    acc += dist(i);
    if (u < acc) return i;
  }
  return last_positive;
}

double token_information(double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("token_information: variance must be positive");
  return 0.5 * std::log(2.0 * M_PI * M_E * sigma2);
}

double statement_information(std::span<const double> sigma2) {
  double total = 0.0;
  for (double s : sigma2) total += token_information(s);
  return total;
}

namespace {

struct Hypothesis {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  CellState<double> state;
};

// Higher log-probability first; equal scores fall back to token order.
bool ranks_before(const std::vector<TokenId>& a, double la, const std::vector<TokenId>& b,
                  double lb) {
  if (la != lb) return la > lb;
  return a < b;
}

}  // namespace

BeamResult select_beam(std::span<const TokenId> context, const Parameters& params,
                       const DecoderConfig& config, TokenId stop, TokenId stop_dialogue,
                       const StatementGrammar* grammar) {
  config.validate();
  const auto width = static_cast<std::size_t>(config.beam_width);
  std::vector<Hypothesis> live;
  live.push_back({{}, 0.0, encode<double>(context, params)});
  std::vector<BeamResult> done;

  for (int len = 0; len < config.max_statement_len && !live.empty(); ++len) {
    struct Candidate {
      std::size_t parent;
      TokenId token;
      double log_prob;
      std::vector<TokenId> tokens;
    };
    std::vector<Candidate> candidates;
    for (std::size_t b = 0; b < live.size(); ++b) {
      TokenFilter filter;
      if (grammar != nullptr) filter = grammar->admissible(live[b].tokens);
      const Eigen::VectorXd logp = log_softmax(score<double>(live[b].state, params), &filter);
      for (TokenId t = 0; t < logp.size(); ++t) {
        if (!admits(&filter, t)) continue;
        std::vector<TokenId> seq = live[b].tokens;
        seq.push_back(t);
        candidates.push_back({b, t, live[b].log_prob + logp(t), std::move(seq)});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return ranks_before(a.tokens, a.log_prob, b.tokens, b.log_prob);
    });
    if (candidates.size() > width) candidates.resize(width);

    std::vector<Hypothesis> next;
    for (auto& c : candidates) {
      const bool complete = c.token == stop || c.token == stop_dialogue ||
                            (grammar != nullptr && grammar->is_complete(c.tokens));
      if (complete) {
        done.push_back({std::move(c.tokens), c.log_prob, true});
      } else {
        next.push_back({std::move(c.tokens), c.log_prob,
                        forward_step<double>(live[c.parent].state, c.token, params)});
      }
    }
    live = std::move(next);
  }

  if (!done.empty()) {
    auto best = std::min_element(done.begin(), done.end(), [](const auto& a, const auto& b) {
      return ranks_before(a.tokens, a.log_prob, b.tokens, b.log_prob);
    });
    return *best;
  }
  if (live.empty()) throw ContractError("select_beam: search produced no hypothesis");
  auto best = std::min_element(live.begin(), live.end(), [](const auto& a, const auto& b) {
    return ranks_before(a.tokens, a.log_prob, b.tokens, b.log_prob);
  });
  return BeamResult{best->tokens, best->log_prob, false};
}

DecodedStatement decode_statement(std::span<const TokenId> context, const Parameters& params,
                                  const DecoderConfig& decoder, const EnsembleConfig& ensemble,
                                  const StatementGrammar* grammar, TokenId stop,
                                  TokenId stop_dialogue, std::int64_t beta_step, Rng& rng) {
  DecodedStatement out;
  std::vector<TokenId> seq(context.begin(), context.end());
  const std::size_t context_len = seq.size();

  auto filter_at = [&](std::span<const TokenId> statement) {
    return grammar != nullptr ? grammar->admissible(statement) : TokenFilter();
  };
  auto forced_token = [&](const TokenFilter& f) -> std::optional<TokenId> {
    if (f.size() == 0 || f.count() != 1) return std::nullopt;
    for (TokenId t = 0; t < f.size(); ++t) {
      if (f(t)) return t;
    }
    return std::nullopt;
  };

  if (decoder.strategy == Strategy::kBeam) {
    BeamResult beam = select_beam(context, params, decoder, stop, stop_dialogue, grammar);
    out.beam_unfinished = !beam.finished;
    for (std::size_t k = 0; k < beam.tokens.size(); ++k) {
      TokenFilter f = filter_at(std::span<const TokenId>(beam.tokens).first(k));
      if (!forced_token(f)) {
        DecodedStep s;
        s.prefix_len = context_len + k;
        s.token = beam.tokens[k];
        s.mask = Mask::identity(params.hidden_dim());
        s.filter = std::move(f);
        s.beta = decoder.beta.at(beta_step + static_cast<std::int64_t>(k));
        std::vector<TokenId> prefix(context.begin(), context.end());
        prefix.insert(prefix.end(), beam.tokens.begin(),
                      beam.tokens.begin() + static_cast<std::ptrdiff_t>(k));
        s.log_prob = log_softmax(context_scores<double>(prefix, params), &s.filter)(s.token);
        out.steps.push_back(std::move(s));
      }
    }
    out.tokens = std::move(beam.tokens);
    return out;
  }

  const double floor = 1.0 / ensemble.tau;
  for (int k = 0; k < decoder.max_statement_len; ++k) {
    const std::span<const TokenId> statement(seq.data() + context_len, seq.size() - context_len);
    TokenFilter f = filter_at(statement);
    TokenId token;
    if (auto forced = forced_token(f)) {
      token = *forced;
    } else {
      const double beta = decoder.beta.at(beta_step + k);
      Ensemble draws = draw_ensemble<double>(seq, params, ensemble, rng);
      Moments m = posterior_moments(draws, ensemble.tau);
      ++out.moments_computed;
      if (!(m.variance >= floor).all()) ++out.floor_violations;
      const TokenFilter* fp = f.size() ? &f : nullptr;
      std::size_t credited = 0;
      switch (decoder.strategy) {
        case Strategy::kGreedy: token = select_greedy(m, fp); break;
        case Strategy::kUcb: token = select_ucb(m, beta, fp, decoder.ucb_exponent); break;
        case Strategy::kMaxEntropy: token = select_max_entropy(m, fp); break;
        case Strategy::kSample: {
          // A draw from the average of the member softmaxes: pick a member
          // uniformly, then sample its softmax. That member is credited.
          credited = static_cast<std::size_t>(
              uniform_index(rng, static_cast<std::uint64_t>(draws.size())));
          const auto row = draws.samples.row(static_cast<Eigen::Index>(credited)).transpose();
          token = select_sample(softmax(row, fp), rng);
          break;
        }
        default: throw ContractError("decode_statement: unsupported strategy");
      }
      DecodedStep s;
      s.prefix_len = seq.size();
      s.token = token;
      s.log_prob = log_softmax(
          draws.samples.row(static_cast<Eigen::Index>(credited)).transpose(), fp)(token);
      s.mask = std::move(draws.masks[credited]);
      s.filter = std::move(f);
      s.beta = beta;
      s.mean = std::move(m.mean);
      s.std = std::move(m.std);
      out.steps.push_back(std::move(s));
    }
    seq.push_back(token);
    const std::span<const TokenId> now(seq.data() + context_len, seq.size() - context_len);
    if (token == stop || token == stop_dialogue) break;
    if (grammar != nullptr && grammar->is_complete(now)) break;
  }
  out.tokens.assign(seq.begin() + static_cast<std::ptrdiff_t>(context_len), seq.end());
  return out;
}

void RegretLedger::write_csv(std::ostream& out) const {
  out << "step,chosen,regret,bound\n";
  for (const auto& e : entries) {
    out << e.step << ',' << e.chosen << ',' << format_number(e.regret) << ','
        << format_number(e.bound) << '\n';
  }
}

RegretLedger regret_record(RegretLedger ledger, const Eigen::VectorXd& oracle_scores,
                           TokenId chosen, const Moments& m, double beta) {
  if (oracle_scores.size() != m.size() || chosen < 0 || chosen >= oracle_scores.size()) {
    throw ConfigError("regret_record: oracle/moments size mismatch or bad token");
  }
  RegretEntry e;
  e.step = static_cast<std::int64_t>(ledger.entries.size());
  e.chosen = chosen;
  e.best = argmax_admissible(oracle_scores);
  e.regret = oracle_scores(e.best) - oracle_scores(chosen);
  e.bound = 2.0 * beta * m.std(chosen);
  ledger.cumulative_regret += e.regret;
  ledger.cumulative_bound += e.bound;
  ledger.entries.push_back(e);
  return ledger;
}

}  // namespace infoseek
