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

#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "infoseek/diffnet.hpp"
#include "infoseek/errors.hpp"

using namespace infoseek;

namespace {

// Loop-by-loop gated cell written from the update equations, used as an
// oracle for the vectorised implementation.
std::vector<double> oracle_step(const std::vector<double>& prev, TokenId token,
                                const Parameters& p, const std::vector<double>& mult) {
  const int h = static_cast<int>(p.hidden_dim());
  const int e = static_cast<int>(p.embed_dim());
  auto sig = [](double a) { return 1.0 / (1.0 + std::exp(-a)); };
  std::vector<double> hm(h), z(h), r(h), out(h);
  for (int i = 0; i < h; ++i) hm[i] = prev[i] * mult[i];
  auto pre = [&](int row, const std::vector<double>& hin) {
    double a = p.gate_bias(row);
    for (int k = 0; k < e; ++k) a += p.input_weights(row, k) * p.token_embeddings(token, k);
    for (int k = 0; k < h; ++k) a += p.recurrent_weights(row, k) * hin[k];
    return a;
  };
  for (int i = 0; i < h; ++i) {
    z[i] = sig(pre(i, hm));
    r[i] = sig(pre(h + i, hm));
  }
  std::vector<double> rh(h);
  for (int i = 0; i < h; ++i) rh[i] = r[i] * hm[i];
  for (int i = 0; i < h; ++i) {
    const double n = std::tanh(pre(2 * h + i, rh));
    out[i] = (1.0 - z[i]) * n + z[i] * prev[i];
  }
  return out;
}

Parameters random_params(Eigen::Index v, Eigen::Index e, Eigen::Index h, std::uint64_t seed,
                         double scale = 0.5) {
  Rng rng(seed);
  return Parameters::uniform(v, e, h, rng, scale);
}

}  // namespace

TEST_CASE("zero weights keep the zero state fixed") {
  const auto p = Parameters::zeros(5, 3, 4);
  const CellState<double> h0 = CellState<double>::Zero(4);
  for (TokenId t = 0; t < 5; ++t) CHECK(forward_step(h0, t, p).isZero(0.0));
}

TEST_CASE("forward_step matches the loop oracle") {
  const auto p = random_params(7, 5, 6, 11);
  Rng rng(3);
  const auto mask = Mask::sample(6, 0.5, rng);
  const Eigen::ArrayXd mult = mask.multiplier();
  std::vector<double> prev(6), mvec(6), ones(6, 1.0);
  CellState<double> h(6);
  for (int i = 0; i < 6; ++i) {
    prev[i] = h(i) = 0.3 * (i - 2.5);
    mvec[i] = mult(i);
  }
  const auto plain = forward_step(h, 4, p);
  const auto masked = forward_step(h, 4, p, &mask);
  const auto o_plain = oracle_step(prev, 4, p, ones);
  const auto o_masked = oracle_step(prev, 4, p, mvec);
  for (int i = 0; i < 6; ++i) {
    CHECK(plain(i) == doctest::Approx(o_plain[i]).epsilon(1e-12));
    CHECK(masked(i) == doctest::Approx(o_masked[i]).epsilon(1e-12));
  }
}

TEST_CASE("rate zero mask is the identity") {
  const auto p = random_params(9, 4, 8, 5);
  Rng rng(1);
  const auto mask = Mask::sample(8, 0.0, rng);
  CHECK(mask.kept.all());
  const CellState<double> h = CellState<double>::LinSpaced(8, -1.0, 1.0);
  CHECK(forward_step(h, 2, p, &mask) == forward_step(h, 2, p));
  CHECK(score(h, p, &mask) == score(h, p));
}

TEST_CASE("forward and score are deterministic") {
  const auto p = random_params(9, 4, 8, 5);
  Rng rng(2);
  const auto mask = Mask::sample(8, 0.5, rng);
  const CellState<double> h = CellState<double>::LinSpaced(8, -1.0, 1.0);
  CHECK(forward_step(h, 3, p, &mask) == forward_step(h, 3, p, &mask));
  const std::vector<TokenId> ctx{1, 2, 3, 8, 0};
  CHECK(context_scores<double>(ctx, p, &mask) == context_scores<double>(ctx, p, &mask));
}

TEST_CASE("score of a zero state is the output bias") {
  auto p = Parameters::zeros(4, 2, 3);
  p.output_bias << 0.5, -1.0, 2.0, 0.25;
  const CellState<double> zero = CellState<double>::Zero(3);
  CHECK(score(zero, p) == p.output_bias);
  auto q = random_params(4, 2, 3, 9);
  CHECK(score(CellState<double>(CellState<double>::Ones(3) * 0.0), q) == q.output_bias);
}

TEST_CASE("score rejects non-finite states and shape mismatches") {
  const auto p = random_params(4, 2, 3, 9);
  CellState<double> bad = CellState<double>::Zero(3);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(score(bad, p), NumericError);
  CHECK_THROWS_AS(score(CellState<double>(CellState<double>::Zero(5)), p), ConfigError);
  CHECK_THROWS_AS(forward_step(CellState<double>(CellState<double>::Zero(3)), 4, p), ConfigError);
  Rng rng(1);
  const auto wrong = Mask::sample(5, 0.5, rng);
  CHECK_THROWS_AS(forward_step(CellState<double>(CellState<double>::Zero(3)), 0, p, &wrong),
                  ConfigError);
}

TEST_CASE("one mask is reused across every step of an encoding") {
  const auto p = random_params(6, 3, 5, 21);
  Rng rng(8);
  const auto mask = Mask::sample(5, 0.5, rng);
  const std::vector<TokenId> ctx{0, 3, 5, 1};
  CellState<double> h = CellState<double>::Zero(5);
  for (TokenId t : ctx) h = forward_step(h, t, p, &mask);
  CHECK(encode<double>(ctx, p, &mask) == h);
}

TEST_CASE("batched encoding agrees with per-mask encoding") {
  const auto p = random_params(10, 4, 7, 4);
  Rng rng(5);
  std::vector<Mask> masks;
  Eigen::MatrixXd mult(7, 6);
  for (int j = 0; j < 6; ++j) {
    masks.push_back(Mask::sample(7, 0.5, rng));
    mult.col(j) = masks.back().multiplier().matrix();
  }
  const std::vector<TokenId> ctx{2, 9, 9, 1, 0, 4};
  const Eigen::MatrixXd states = encode_batch<double>(ctx, p, mult);
  for (int j = 0; j < 6; ++j) {
    CHECK((states.col(j) - encode<double>(ctx, p, &masks[j])).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("softmax examples") {
  const Eigen::Vector2d a = softmax(Eigen::Vector2d(0.0, 0.0));
  CHECK(a(0) == doctest::Approx(0.5));
  CHECK(a(1) == doctest::Approx(0.5));
  for (double c : {-7.0, 0.0, 3.5, 1e3}) {
    const Eigen::VectorXd p = softmax(Eigen::VectorXd::Constant(4, c));
    CHECK((p.array() - 0.25).abs().maxCoeff() < 1e-15);
  }
  const Eigen::VectorXd big = softmax(Eigen::Vector2d(1000.0, 0.0));
  CHECK(big.allFinite());
  CHECK(big(0) == doctest::Approx(1.0));
  // Max-subtracted reference: exp(-1000) / (1 + exp(-1000)).
  CHECK(big(1) == doctest::Approx(std::exp(-1000.0) / (1.0 + std::exp(-1000.0))));
}

TEST_CASE("softmax properties on random scores") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(12);
    for (int i = 0; i < 12; ++i) x(i) = 20.0 * (uniform01(rng) - 0.5);
    const double c = 50.0 * (uniform01(rng) - 0.5);
    const Eigen::VectorXd p = softmax(x);
    CHECK((p.array() > 0.0).all());
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
    const Eigen::VectorXd q = softmax((x.array() + c).matrix());
    CHECK((p - q).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("filtered softmax puts zero mass outside the filter") {
  TokenFilter f(4);
  f << true, false, true, false;
  const Eigen::VectorXd p = softmax(Eigen::Vector4d(1.0, 9.0, 1.0, 2.0), &f);
  CHECK(p(1) == 0.0);
  CHECK(p(3) == 0.0);
  CHECK(p(0) == doctest::Approx(0.5));
  const Eigen::VectorXd lp = log_softmax(Eigen::Vector4d(1.0, 9.0, 1.0, 2.0), &f);
  CHECK(lp(0) == doctest::Approx(std::log(0.5)));
  CHECK(std::isinf(lp(1)));
}

TEST_CASE("backward with zero weights is zero") {
  const auto p = random_params(8, 3, 4, 2);
  const std::vector<TokenId> ctx{1, 2, 3};
  std::vector<Step> steps{{ctx, 4, nullptr, 0.0, nullptr}, {ctx, 7, nullptr, 0.0, nullptr}};
  const auto g = backward<double>(steps, p);
  CHECK(g.squared_norm() == 0.0);
}

TEST_CASE("backward rejects an empty trajectory") {
  const auto p = random_params(8, 3, 4, 2);
  CHECK_THROWS_AS(backward<double>(std::span<const Step>(), p), ContractError);
}

TEST_CASE("single step gradient agrees with central differences") {
  const auto p = random_params(12, 6, 8, 33);
  Rng rng(4);
  const auto mask = Mask::sample(8, 0.5, rng);
  const std::vector<TokenId> ctx{3, 0, 11, 5};
  std::vector<Step> steps{{ctx, 6, &mask, 1.0, nullptr}};
  CHECK(finite_diff_check<double>(p, steps, 1e-5, rng, 100) <= 1e-4);
}

TEST_CASE("multi step gradient with filters agrees with central differences") {
  const auto p = random_params(12, 6, 8, 34);
  Rng rng(5);
  const auto mask = Mask::sample(8, 0.5, rng);
  TokenFilter f = TokenFilter::Constant(12, true);
  f(2) = f(9) = false;
  const std::vector<TokenId> ctx{3, 0, 11, 5, 5, 1};
  const std::span<const TokenId> all(ctx);
  std::vector<Step> steps{{all.first(2), 6, &mask, 0.7, &f},
                          {all, 1, &mask, -1.2, nullptr},
                          {all.first(0), 4, nullptr, 0.4, &f}};
  CHECK(finite_diff_check<double>(p, steps, 1e-5, rng, 1000000) <= 1e-4);
}

TEST_CASE("doubling the weights doubles the gradient") {
  const auto p = random_params(9, 3, 5, 6);
  const std::vector<TokenId> ctx{1, 8, 2};
  std::vector<Step> one{{ctx, 3, nullptr, 0.8, nullptr}};
  std::vector<Step> two{{ctx, 3, nullptr, 1.6, nullptr}};
  auto g1 = backward<double>(one, p);
  const auto g2 = backward<double>(two, p);
  g1 *= 2.0;
  auto diff = g2;
  diff.add_scaled(g1, -1.0);
  CHECK(std::sqrt(diff.squared_norm()) <= 1e-12 * std::sqrt(g2.squared_norm()));
}

TEST_CASE("finite difference check on a zero net returns zero and is reproducible") {
  const auto p = Parameters::zeros(6, 3, 4);
  const std::vector<TokenId> ctx{1, 2};
  std::vector<Step> steps{{ctx, 3, nullptr, 1.0, nullptr}};
  Rng a(9), b(9);
  // Only the output bias carries gradient here, and it is matched exactly.
  CHECK(finite_diff_check<double>(p, steps, 1e-5, a) <= 1e-9);
  const auto q = random_params(12, 6, 8, 1);
  std::vector<Step> probe{{ctx, 3, nullptr, 1.0, nullptr}};
  Rng c(77), d(77);
  CHECK(finite_diff_check<double>(q, probe, 1e-5, c) == finite_diff_check<double>(q, probe, 1e-5, d));
  CHECK_THROWS_AS(finite_diff_check<double>(q, probe, 0.5, b), ContractError);
}

TEST_CASE("finite difference check of an all-zero objective is exactly zero") {
  const auto p = Parameters::zeros(6, 3, 4);
  const std::vector<TokenId> ctx{1, 2};
  std::vector<Step> steps{{ctx, 3, nullptr, 0.0, nullptr}};
  Rng rng(1);
  CHECK(finite_diff_check<double>(p, steps, 1e-5, rng) == 0.0);
}

TEST_CASE("parameter containers") {
  auto p = random_params(5, 2, 3, 1);
  CHECK(p.parameter_count() == 5 * 2 + 9 * 2 + 9 * 3 + 9 + 3 * 5 + 5);
  CHECK(p.all_finite());
  p.check_shapes();
  const double before = p.coefficient(7);
  p.coefficient(7) += 1.0;
  CHECK(p.coefficient(7) == before + 1.0);
  CHECK_THROWS_AS(p.coefficient(p.parameter_count()), ConfigError);
  p.output_bias.resize(4);
  CHECK_THROWS_AS(p.check_shapes(), ConfigError);
  CHECK_THROWS_AS(Parameters::zeros(0, 1, 1), ConfigError);
}

TEST_CASE("uniform initialisation is seeded and bounded") {
  const auto a = random_params(20, 8, 16, 42, 0.1);
  const auto b = random_params(20, 8, 16, 42, 0.1);
  CHECK(a == b);
  double worst = 0.0;
  a.visit([&](std::string_view, const auto& m) { worst = std::max(worst, m.cwiseAbs().maxCoeff()); });
  CHECK(worst < 0.1);
}

TEST_CASE("dropout masks keep units with probability one minus rate") {
  Rng rng(12);
  const auto m = Mask::sample(200000, 0.3, rng);
  const double kept = static_cast<double>(m.kept.count()) / 200000.0;
  CHECK(kept == doctest::Approx(0.7).epsilon(0.01));
  const Eigen::ArrayXd mult = m.multiplier();
  CHECK(mult.maxCoeff() == doctest::Approx(1.0 / 0.7));
  CHECK(mult.minCoeff() == 0.0);
  CHECK_THROWS_AS(Mask::sample(4, 1.0, rng), ConfigError);
}
