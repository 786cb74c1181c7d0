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

// MC-dropout reward posterior: N masked passes of the scorer give N sample
// score vectors, from which we take mean, variance (with the tau^-1 noise
// floor) and the averaged predictive token distribution.

#ifndef INFOSEEK_ENSEMBLE_HPP_
#define INFOSEEK_ENSEMBLE_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "infoseek/diffnet.hpp"
#include "infoseek/errors.hpp"
#include "infoseek/random.hpp"

namespace infoseek {

struct EnsembleConfig {
  int samples = 10;
  double dropout_rate = 0.5;
  double tau = 100.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (samples < 1) throw ConfigError("ensemble: samples must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
      throw ConfigError("ensemble: dropout_rate must lie in [0, 1)");
    }
    if (!(tau > 0.0)) throw ConfigError("ensemble: tau must be positive");
  }
};

// Row i holds the scores produced under masks[i].
template <typename Scalar>
struct RewardEnsemble {
  MatrixX<Scalar> samples;  // N x |V|
  std::vector<DropoutMask<Scalar>> masks;

  Eigen::Index size() const { return samples.rows(); }
};

template <typename Scalar>
struct PosteriorMoments {
  ArrayX<Scalar> mean;
  ArrayX<Scalar> variance;  // includes tau^-1
  ArrayX<Scalar> std;

  Eigen::Index size() const { return mean.size(); }
};

// N masks drawn in order from `rng`; each runs the full context encoding and
// the output head under that one mask.
template <typename Scalar>
RewardEnsemble<Scalar> draw_ensemble(std::span<const TokenId> context,
                                     const PolicyParameters<Scalar>& params,
                                     const EnsembleConfig& config, Rng& rng) {
  config.validate();
  RewardEnsemble<Scalar> out;
  out.samples.resize(config.samples, params.vocab_size());
  out.masks.reserve(static_cast<std::size_t>(config.samples));
  MatrixX<Scalar> mult(params.hidden_dim(), config.samples);
  for (int i = 0; i < config.samples; ++i) {
    out.masks.push_back(DropoutMask<Scalar>::sample(params.hidden_dim(), config.dropout_rate, rng));
    mult.col(i) = out.masks.back().multiplier().matrix();
  }
  const MatrixX<Scalar> states = encode_batch<Scalar>(context, params, mult);
  if (!states.allFinite()) throw NumericError("draw_ensemble: non-finite hidden state");
  out.samples = ((params.output_head.transpose() * states.cwiseProduct(mult)).colwise() +
                 params.output_bias)
                    .transpose();
  return out;
}

template <typename Scalar>
RewardEnsemble<Scalar> draw_ensemble(std::span<const TokenId> context,
                                     const PolicyParameters<Scalar>& params,
                                     const EnsembleConfig& config) {
  Rng rng = make_rng(config.seed);
  return draw_ensemble(context, params, config, rng);
}

// mean = column average; variance = population variance (divisor N) + 1/tau.
template <typename Derived>
PosteriorMoments<typename Derived::Scalar> posterior_moments(
    const Eigen::MatrixBase<Derived>& samples, double tau) {
  using Scalar = typename Derived::Scalar;
  if (!(tau > 0.0)) throw DomainError("posterior_moments: tau must be positive");
  if (samples.rows() < 1) throw ContractError("posterior_moments: empty ensemble");
  PosteriorMoments<Scalar> m;
  m.mean = samples.colwise().mean().transpose().array();
  const auto centered = samples.rowwise() - m.mean.matrix().transpose();
  m.variance = centered.array().square().colwise().sum().transpose() /
                   static_cast<Scalar>(samples.rows()) +
               static_cast<Scalar>(1.0 / tau);
  m.std = m.variance.sqrt();
  return m;
}

template <typename Scalar>
PosteriorMoments<Scalar> posterior_moments(const RewardEnsemble<Scalar>& ensemble, double tau) {
  return posterior_moments(ensemble.samples, tau);
}

// (1/N) sum_i softmax(row i). Not the softmax of the mean row.
template <typename Derived>
VectorX<typename Derived::Scalar> predictive_distribution(
    const Eigen::MatrixBase<Derived>& samples, const TokenFilter* filter = nullptr) {
  using Scalar = typename Derived::Scalar;
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(samples.cols());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    acc += softmax(samples.row(i).transpose(), filter);
  }
  return acc / static_cast<Scalar>(samples.rows());
}

template <typename Scalar>
VectorX<Scalar> predictive_distribution(const RewardEnsemble<Scalar>& ensemble,
                                        const TokenFilter* filter = nullptr) {
  return predictive_distribution(ensemble.samples, filter);
}

// P(|f - mu| < beta sigma) >= 1 - 1/beta^2, clipped at zero.
inline double chebyshev_lower_bound(double beta) {
  if (!(beta > 0.0)) throw DomainError("chebyshev_lower_bound: beta must be positive");
  return std::max(0.0, 1.0 - 1.0 / (beta * beta));
}

// For each probe context: moments from one ensemble, then one fresh
// independent masked pass f. Returns the fraction of (probe, token) pairs
// with |f(w) - mean(w)| < beta * std(w).
template <typename Scalar>
double coverage_check(const PolicyParameters<Scalar>& params, const EnsembleConfig& config,
                      std::span<const std::vector<TokenId>> probes, double beta, Rng& rng) {
  if (!(beta > 1.0)) throw DomainError("coverage_check: beta must exceed 1");
  if (probes.empty()) throw ContractError("coverage_check: no probe contexts");
  std::uint64_t inside = 0, total = 0;
  for (const auto& probe : probes) {
    const auto ensemble = draw_ensemble<Scalar>(probe, params, config, rng);
    const auto m = posterior_moments(ensemble, config.tau);
    const auto mask = DropoutMask<Scalar>::sample(params.hidden_dim(), config.dropout_rate, rng);
    const ArrayX<Scalar> f = context_scores<Scalar>(probe, params, &mask).array();
    inside += static_cast<std::uint64_t>(
        ((f - m.mean).abs() < static_cast<Scalar>(beta) * m.std).count());
    total += static_cast<std::uint64_t>(f.size());
  }
  return static_cast<double>(inside) / static_cast<double>(total);
}

using Ensemble = RewardEnsemble<double>;
using Moments = PosteriorMoments<double>;

}  // namespace infoseek

#endif  // INFOSEEK_ENSEMBLE_HPP_
