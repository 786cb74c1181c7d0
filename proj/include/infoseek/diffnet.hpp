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

// Differentiable recurrent scorer: a GRU-style gated cell over token
// embeddings with a linear output head, variational (per-sequence) dropout
// on the hidden state, and hand-written backpropagation through time.
//
// Everything here is templated on the scalar type; the library itself
// instantiates double.

#ifndef INFOSEEK_DIFFNET_HPP_
#define INFOSEEK_DIFFNET_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infoseek/errors.hpp"
#include "infoseek/random.hpp"
#include "infoseek/vocabulary.hpp"

namespace infoseek {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

// Hidden state of the cell. Zero at the start of every sequence.
template <typename Scalar>
using CellState = VectorX<Scalar>;

// Tokens a decoder may emit at the current position. An empty filter admits
// every token.
using TokenFilter = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline bool admits(const TokenFilter* filter, TokenId token) {
  return filter == nullptr || filter->size() == 0 || (*filter)(token);
}

// All trainable arrays. Also used as the gradient container.
//
// Gate blocks in input_weights, recurrent_weights and gate_bias are stacked
// as [update; reset; candidate], each hidden_dim rows.
template <typename Scalar>
struct PolicyParameters {
  MatrixX<Scalar> token_embeddings;   // |V| x e
  MatrixX<Scalar> input_weights;      // 3h x e
  MatrixX<Scalar> recurrent_weights;  // 3h x h
  VectorX<Scalar> gate_bias;          // 3h
  MatrixX<Scalar> output_head;        // h x |V|
  VectorX<Scalar> output_bias;        // |V|

  static PolicyParameters zeros(Eigen::Index vocab, Eigen::Index embed, Eigen::Index hidden) {
    if (vocab < 1 || embed < 1 || hidden < 1) {
      throw ConfigError("PolicyParameters: all dimensions must be positive");
    }
    PolicyParameters p;
    p.token_embeddings = MatrixX<Scalar>::Zero(vocab, embed);
    p.input_weights = MatrixX<Scalar>::Zero(3 * hidden, embed);
    p.recurrent_weights = MatrixX<Scalar>::Zero(3 * hidden, hidden);
    p.gate_bias = VectorX<Scalar>::Zero(3 * hidden);
    p.output_head = MatrixX<Scalar>::Zero(hidden, vocab);
    p.output_bias = VectorX<Scalar>::Zero(vocab);
    return p;
  }

  // Every entry uniform in (-scale, scale), drawn in visit order.
  static PolicyParameters uniform(Eigen::Index vocab, Eigen::Index embed, Eigen::Index hidden,
                                  Rng& rng, Scalar scale = Scalar(0.1)) {
    PolicyParameters p = zeros(vocab, embed, hidden);
    p.visit([&](std::string_view, auto& a) {
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        a.data()[i] = scale * static_cast<Scalar>(2.0 * uniform01(rng) - 1.0);
      }
    });
    return p;
  }

  // Zero container shaped like `other`.
  static PolicyParameters zeros_like(const PolicyParameters& other) {
    return zeros(other.vocab_size(), other.embed_dim(), other.hidden_dim());
  }

  Eigen::Index vocab_size() const { return token_embeddings.rows(); }
  Eigen::Index embed_dim() const { return token_embeddings.cols(); }
  Eigen::Index hidden_dim() const { return output_head.rows(); }

  template <typename F>
  void visit(F&& f) {
    f("token_embeddings", token_embeddings);
    f("input_weights", input_weights);
    f("recurrent_weights", recurrent_weights);
    f("gate_bias", gate_bias);
    f("output_head", output_head);
    f("output_bias", output_bias);
  }
  template <typename F>
  void visit(F&& f) const {
    f("token_embeddings", token_embeddings);
    f("input_weights", input_weights);
    f("recurrent_weights", recurrent_weights);
    f("gate_bias", gate_bias);
    f("output_head", output_head);
    f("output_bias", output_bias);
  }

  void check_shapes() const {
    const Eigen::Index v = vocab_size(), e = embed_dim(), h = hidden_dim();
    const bool ok = v > 0 && e > 0 && h > 0 && input_weights.rows() == 3 * h &&
                    input_weights.cols() == e && recurrent_weights.rows() == 3 * h &&
                    recurrent_weights.cols() == h && gate_bias.size() == 3 * h &&
                    output_head.cols() == v && output_bias.size() == v;
    if (!ok) throw ConfigError("PolicyParameters: inconsistent array shapes");
  }

  bool all_finite() const {
    bool finite = true;
    visit([&](std::string_view, const auto& a) { finite = finite && a.allFinite(); });
    return finite;
  }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    visit([&](std::string_view, const auto& a) { n += a.size(); });
    return n;
  }

  // Flat addressing in visit order, column-major within each array.
  Scalar& coefficient(Eigen::Index flat) {
    Scalar* out = nullptr;
    visit([&](std::string_view, auto& a) {
      if (out == nullptr && flat < a.size()) out = a.data() + flat;
      else if (out == nullptr) flat -= a.size();
    });
    if (out == nullptr) throw ConfigError("PolicyParameters: flat index out of range");
    return *out;
  }
  Scalar coefficient(Eigen::Index flat) const {
    return const_cast<PolicyParameters&>(*this).coefficient(flat);
  }

  Scalar squared_norm() const {
    Scalar s = 0;
    visit([&](std::string_view, const auto& a) { s += a.squaredNorm(); });
    return s;
  }

  // this += alpha * other
  PolicyParameters& add_scaled(const PolicyParameters& other, Scalar alpha) {
    token_embeddings += alpha * other.token_embeddings;
    input_weights += alpha * other.input_weights;
    recurrent_weights += alpha * other.recurrent_weights;
    gate_bias += alpha * other.gate_bias;
    output_head += alpha * other.output_head;
    output_bias += alpha * other.output_bias;
    return *this;
  }

  PolicyParameters& operator*=(Scalar alpha) {
    visit([&](std::string_view, auto& a) { a *= alpha; });
    return *this;
  }

  bool operator==(const PolicyParameters& o) const {
    return token_embeddings == o.token_embeddings && input_weights == o.input_weights &&
           recurrent_weights == o.recurrent_weights && gate_bias == o.gate_bias &&
           output_head == o.output_head && output_bias == o.output_bias;
  }
};

// Inverted dropout on the hidden state. Kept units are rescaled by
// 1/(1-rate), so a rate-0 mask is the identity. One mask is reused for
// every step of a sequence.
template <typename Scalar>
struct DropoutMask {
  Eigen::Array<bool, Eigen::Dynamic, 1> kept;
  double rate = 0.0;

  static DropoutMask sample(Eigen::Index hidden, double rate, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
    DropoutMask m;
    m.rate = rate;
    m.kept.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) m.kept(i) = uniform01(rng) >= rate;
    return m;
  }

  static DropoutMask identity(Eigen::Index hidden) {
    DropoutMask m;
    m.kept = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(hidden, true);
    return m;
  }

  Eigen::Index size() const { return kept.size(); }

  ArrayX<Scalar> multiplier() const {
    const Scalar keep_scale = Scalar(1) / static_cast<Scalar>(1.0 - rate);
    return kept.template cast<Scalar>() * keep_scale;
  }

  bool operator==(const DropoutMask& o) const {
    return rate == o.rate && kept.size() == o.kept.size() && (kept == o.kept).all();
  }
};

namespace detail {

template <typename Scalar>
struct StepCache {
  TokenId token = 0;
  VectorX<Scalar> prev;         // h_{t-1}
  VectorX<Scalar> masked_prev;  // m * h_{t-1}
  VectorX<Scalar> update;       // z
  VectorX<Scalar> reset;        // r
  VectorX<Scalar> candidate;    // n
};

template <typename Scalar>
VectorX<Scalar> sigmoid(const VectorX<Scalar>& a) {
  return (Scalar(1) / (Scalar(1) + (-a.array()).exp())).matrix();
}

template <typename Scalar>
void check_step_inputs(const CellState<Scalar>& state, TokenId token,
                       const PolicyParameters<Scalar>& params,
                       const DropoutMask<Scalar>* mask) {
  const Eigen::Index h = params.hidden_dim();
  if (token < 0 || token >= params.vocab_size()) {
    throw ConfigError("forward_step: token index outside vocabulary");
  }
  if (state.size() != h) throw ConfigError("forward_step: state dimension mismatch");
  if (mask != nullptr && mask->size() != h) {
    throw ConfigError("forward_step: dropout mask dimension mismatch");
  }
}

// h' = (1 - z) * n + z * h,  hm = m * h
// z = sig(Wz x + Uz hm + bz), r = sig(Wr x + Ur hm + br)
// n = tanh(Wn x + Un (r * hm) + bn)
template <typename Scalar>
CellState<Scalar> gru_step(const CellState<Scalar>& state, TokenId token,
                           const PolicyParameters<Scalar>& p, const ArrayX<Scalar>* mult,
                           StepCache<Scalar>* cache) {
  const Eigen::Index h = p.hidden_dim();
  VectorX<Scalar> hm = mult != nullptr ? VectorX<Scalar>((state.array() * *mult).matrix()) : state;
  const VectorX<Scalar> gx =
      p.input_weights * p.token_embeddings.row(token).transpose() + p.gate_bias;
  const VectorX<Scalar> gh = p.recurrent_weights.topRows(2 * h) * hm;
  VectorX<Scalar> z = sigmoid<Scalar>(gx.head(h) + gh.head(h));
  VectorX<Scalar> r = sigmoid<Scalar>(gx.segment(h, h) + gh.tail(h));
  const VectorX<Scalar> rh = r.cwiseProduct(hm);
  VectorX<Scalar> n =
      (gx.tail(h) + p.recurrent_weights.bottomRows(h) * rh).array().tanh().matrix();
  CellState<Scalar> out =
      ((Scalar(1) - z.array()) * n.array() + z.array() * state.array()).matrix();
  if (cache != nullptr) {
    cache->token = token;
    cache->prev = state;
    cache->masked_prev = std::move(hm);
    cache->update = std::move(z);
    cache->reset = std::move(r);
    cache->candidate = std::move(n);
  }
  return out;
}

}  // namespace detail

// One gated-cell update. The mask, when present, multiplies the incoming
// hidden state before it enters the gates.
template <typename Scalar>
CellState<Scalar> forward_step(const CellState<Scalar>& state, TokenId token,
                               const PolicyParameters<Scalar>& params,
                               const DropoutMask<Scalar>* mask = nullptr) {
  detail::check_step_inputs(state, token, params, mask);
  if (mask == nullptr) return detail::gru_step<Scalar>(state, token, params, nullptr, nullptr);
  const ArrayX<Scalar> mult = mask->multiplier();
  return detail::gru_step<Scalar>(state, token, params, &mult, nullptr);
}

// f_theta(w) for every token: output head applied to the (masked) state.
template <typename Scalar>
VectorX<Scalar> score(const CellState<Scalar>& state, const PolicyParameters<Scalar>& params,
                      const DropoutMask<Scalar>* mask = nullptr) {
  if (state.size() != params.hidden_dim()) throw ConfigError("score: state dimension mismatch");
  if (!state.allFinite()) throw NumericError("score: non-finite hidden state");
  if (mask == nullptr) {
    return params.output_head.transpose() * state + params.output_bias;
  }
  if (mask->size() != params.hidden_dim()) {
    throw ConfigError("score: dropout mask dimension mismatch");
  }
  const VectorX<Scalar> masked = (state.array() * mask->multiplier()).matrix();
  return params.output_head.transpose() * masked + params.output_bias;
}

// Runs the cell over a whole context from the zero state.
template <typename Scalar>
CellState<Scalar> encode(std::span<const TokenId> context, const PolicyParameters<Scalar>& params,
                         const DropoutMask<Scalar>* mask = nullptr) {
  CellState<Scalar> h = CellState<Scalar>::Zero(params.hidden_dim());
  if (mask != nullptr && mask->size() != params.hidden_dim()) {
    throw ConfigError("encode: dropout mask dimension mismatch");
  }
  ArrayX<Scalar> mult;
  if (mask != nullptr) mult = mask->multiplier();
  for (TokenId t : context) {
    detail::check_step_inputs<Scalar>(h, t, params, nullptr);
    h = detail::gru_step<Scalar>(h, t, params, mask != nullptr ? &mult : nullptr, nullptr);
  }
  return h;
}

template <typename Scalar>
VectorX<Scalar> context_scores(std::span<const TokenId> context,
                               const PolicyParameters<Scalar>& params,
                               const DropoutMask<Scalar>* mask = nullptr) {
  return score<Scalar>(encode<Scalar>(context, params, mask), params, mask);
}

// Encodes one context under several masks at once. Column j of `mult` is
// the multiplier of mask j; column j of the result is the final state that
// encode() produces under that mask.
template <typename Scalar>
MatrixX<Scalar> encode_batch(std::span<const TokenId> context,
                             const PolicyParameters<Scalar>& params,
                             const MatrixX<Scalar>& mult) {
  const Eigen::Index h = params.hidden_dim();
  if (mult.rows() != h) throw ConfigError("encode_batch: mask dimension mismatch");
  MatrixX<Scalar> state = MatrixX<Scalar>::Zero(h, mult.cols());
  MatrixX<Scalar> z, r, n;
  for (TokenId t : context) {
    if (t < 0 || t >= params.vocab_size()) {
      throw ConfigError("encode_batch: token index outside vocabulary");
    }
    const VectorX<Scalar> gx =
        params.input_weights * params.token_embeddings.row(t).transpose() + params.gate_bias;
    const MatrixX<Scalar> hm = state.cwiseProduct(mult);
    const MatrixX<Scalar> gh = params.recurrent_weights.topRows(2 * h) * hm;
    z = (Scalar(1) / (Scalar(1) + (-(gh.topRows(h).colwise() + gx.head(h))).array().exp()))
            .matrix();
    r = (Scalar(1) /
         (Scalar(1) + (-(gh.bottomRows(h).colwise() + gx.segment(h, h))).array().exp()))
            .matrix();
    n = ((params.recurrent_weights.bottomRows(h) * r.cwiseProduct(hm)).colwise() + gx.tail(h))
            .array()
            .tanh()
            .matrix();
    state = ((Scalar(1) - z.array()) * n.array() + z.array() * state.array()).matrix();
  }
  return state;
}

// Max-subtracted softmax. Tokens outside `filter` get probability zero.
template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& scores,
                                          const TokenFilter* filter = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = scores.size();
  const bool filtered = filter != nullptr && filter->size() > 0;
  if (filtered && filter->size() != n) throw ConfigError("softmax: filter size mismatch");
  Scalar top = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!filtered || (*filter)(i)) top = std::max(top, scores(i));
  }
  if (!std::isfinite(top)) throw NumericError("softmax: no finite admissible score");
  VectorX<Scalar> p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = (!filtered || (*filter)(i)) ? std::exp(scores(i) - top) : Scalar(0);
  }
  return p / p.sum();
}

template <typename Derived>
VectorX<typename Derived::Scalar> log_softmax(const Eigen::MatrixBase<Derived>& scores,
                                              const TokenFilter* filter = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = scores.size();
  const bool filtered = filter != nullptr && filter->size() > 0;
  Scalar top = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!filtered || (*filter)(i)) top = std::max(top, scores(i));
  }
  Scalar total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!filtered || (*filter)(i)) total += std::exp(scores(i) - top);
  }
  const Scalar lse = top + std::log(total);
  VectorX<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i) = (!filtered || (*filter)(i)) ? scores(i) - lse
                                         : -std::numeric_limits<Scalar>::infinity();
  }
  return out;
}

// One term of the policy-gradient objective: weight * log pi(token | context).
template <typename Scalar>
struct ScoredStep {
  std::span<const TokenId> context;
  TokenId token = 0;
  const DropoutMask<Scalar>* mask = nullptr;
  Scalar weight = 1;
  const TokenFilter* admissible = nullptr;
};

// Sum over steps of weight * log softmax(score)[token].
template <typename Scalar>
Scalar objective(std::span<const ScoredStep<Scalar>> steps,
                 const PolicyParameters<Scalar>& params) {
  Scalar total = 0;
  for (const auto& s : steps) {
    const VectorX<Scalar> logp =
        log_softmax(context_scores<Scalar>(s.context, params, s.mask), s.admissible);
    total += s.weight * logp(s.token);
  }
  return total;
}

// Adds d/dtheta [weight * log pi(token | context)] into `grad`.
template <typename Scalar>
void accumulate_gradient(const ScoredStep<Scalar>& step, const PolicyParameters<Scalar>& p,
                         PolicyParameters<Scalar>& grad) {
  const Eigen::Index h = p.hidden_dim();
  if (step.token < 0 || step.token >= p.vocab_size()) {
    throw ConfigError("backward: token index outside vocabulary");
  }
  if (!admits(step.admissible, step.token)) {
    throw ContractError("backward: chosen token is not admissible");
  }
  if (step.mask != nullptr && step.mask->size() != h) {
    throw ConfigError("backward: dropout mask dimension mismatch");
  }
  if (step.weight == Scalar(0)) return;

  ArrayX<Scalar> mult;
  const ArrayX<Scalar>* mult_ptr = nullptr;
  if (step.mask != nullptr) {
    mult = step.mask->multiplier();
    mult_ptr = &mult;
  }

  std::vector<detail::StepCache<Scalar>> caches(step.context.size());
  CellState<Scalar> state = CellState<Scalar>::Zero(h);
  for (std::size_t t = 0; t < step.context.size(); ++t) {
    detail::check_step_inputs<Scalar>(state, step.context[t], p, nullptr);
    state = detail::gru_step<Scalar>(state, step.context[t], p, mult_ptr, &caches[t]);
  }

  const VectorX<Scalar> masked = mult_ptr ? VectorX<Scalar>((state.array() * mult).matrix()) : state;
  const VectorX<Scalar> logits = p.output_head.transpose() * masked + p.output_bias;
  VectorX<Scalar> dlogits = -softmax(logits, step.admissible);
  dlogits(step.token) += Scalar(1);
  dlogits *= step.weight;

  grad.output_head.noalias() += masked * dlogits.transpose();
  grad.output_bias += dlogits;
  VectorX<Scalar> dh = p.output_head * dlogits;
  if (mult_ptr) dh = (dh.array() * mult).matrix();

  const auto Uz = p.recurrent_weights.topRows(h);
  const auto Ur = p.recurrent_weights.middleRows(h, h);
  const auto Un = p.recurrent_weights.bottomRows(h);
  VectorX<Scalar> da(3 * h);
  for (std::size_t k = caches.size(); k-- > 0;) {
    const auto& c = caches[k];
    const auto& z = c.update.array();
    const auto& r = c.reset.array();
    const auto& n = c.candidate.array();
    const auto& hm = c.masked_prev.array();

    const ArrayX<Scalar> dn = dh.array() * (Scalar(1) - z);
    const ArrayX<Scalar> dz = dh.array() * (c.prev.array() - n);
    const ArrayX<Scalar> dcarry = dh.array() * z;
    ArrayX<Scalar> dhm = ArrayX<Scalar>::Zero(h);

    da.tail(h) = (dn * (Scalar(1) - n.square())).matrix();
    const ArrayX<Scalar> drh = (Un.transpose() * da.tail(h)).array();
    const ArrayX<Scalar> dr = drh * hm;
    dhm += drh * r;
    da.head(h) = (dz * z * (Scalar(1) - z)).matrix();
    da.segment(h, h) = (dr * r * (Scalar(1) - r)).matrix();

    const auto x = p.token_embeddings.row(c.token).transpose();
    grad.input_weights.noalias() += da * x.transpose();
    grad.gate_bias += da;
    grad.recurrent_weights.topRows(2 * h).noalias() += da.head(2 * h) * c.masked_prev.transpose();
    grad.recurrent_weights.bottomRows(h).noalias() +=
        da.tail(h) * (r * hm).matrix().transpose();
    dhm += (Uz.transpose() * da.head(h) + Ur.transpose() * da.segment(h, h)).array();
    grad.token_embeddings.row(c.token).noalias() += (p.input_weights.transpose() * da).transpose();

    dh = ((mult_ptr ? ArrayX<Scalar>(dhm * mult) : dhm) + dcarry).matrix();
  }
}

// Gradient of objective(steps, params) with respect to every parameter.
template <typename Scalar>
PolicyParameters<Scalar> backward(std::span<const ScoredStep<Scalar>> steps,
                                  const PolicyParameters<Scalar>& params) {
  params.check_shapes();
  if (steps.empty()) throw ContractError("backward: empty trajectory");
  auto grad = PolicyParameters<Scalar>::zeros_like(params);
  for (const auto& s : steps) {
    if (!std::isfinite(s.weight)) throw ContractError("backward: non-finite step weight");
    accumulate_gradient(s, params, grad);
  }
  return grad;
}

// Central-difference check of backward(). Returns the worst relative error
// over a random sample of `sample_size` parameters (all of them when the net
// is smaller). A pair with both magnitudes below 1e-12 counts as error 0.
template <typename Scalar>
Scalar finite_diff_check(const PolicyParameters<Scalar>& params,
                         std::span<const ScoredStep<Scalar>> probe, Scalar epsilon, Rng& rng,
                         Eigen::Index sample_size = 100) {
  if (!(epsilon > 0 && epsilon <= Scalar(1e-2))) {
    throw ContractError("finite_diff_check: epsilon must lie in (0, 1e-2]");
  }
  const PolicyParameters<Scalar> analytic = backward(probe, params);
  const Eigen::Index total = params.parameter_count();
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(total));
  std::iota(indices.begin(), indices.end(), Eigen::Index{0});
  if (sample_size < total) {
    // Partial Fisher-Yates with the library's own uniform draw.
    for (Eigen::Index i = 0; i < sample_size; ++i) {
      const auto j = i + static_cast<Eigen::Index>(
                             uniform_index(rng, static_cast<std::uint64_t>(total - i)));
      std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
    indices.resize(static_cast<std::size_t>(sample_size));
  }

  PolicyParameters<Scalar> work = params;
  Scalar worst = 0;
  for (Eigen::Index idx : indices) {
    Scalar& coeff = work.coefficient(idx);
    const Scalar saved = coeff;
    coeff = saved + epsilon;
    const Scalar plus = objective<Scalar>(probe, work);
    coeff = saved - epsilon;
    const Scalar minus = objective<Scalar>(probe, work);
    coeff = saved;
    const Scalar numeric = (plus - minus) / (Scalar(2) * epsilon);
    const Scalar exact = analytic.coefficient(idx);
    const Scalar scale = std::max(std::abs(numeric), std::abs(exact));
    if (scale < Scalar(1e-12)) continue;
    worst = std::max(worst, std::abs(numeric - exact) / scale);
  }
  return worst;
}

using Parameters = PolicyParameters<double>;
using Mask = DropoutMask<double>;
using Step = ScoredStep<double>;

}  // namespace infoseek

#endif  // INFOSEEK_DIFFNET_HPP_
