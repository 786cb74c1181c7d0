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
#include <vector>

#include "infoseek/errors.hpp"
#include "infoseek/guesser.hpp"
#include "infoseek/random.hpp"

using namespace infoseek;

namespace {

// Direct Bayes rule over objects with likelihood (1 - eps) / eps.
Eigen::ArrayXd bayes_oracle(const Eigen::ArrayXd& prior, const std::vector<bool>& sat, bool yes,
                            double eps) {
  Eigen::ArrayXd post(prior.size());
  double z = 0.0;
  for (Eigen::Index i = 0; i < prior.size(); ++i) {
    const bool agrees = sat[static_cast<std::size_t>(i)] == yes;
    post(i) = prior(i) * (agrees ? 1.0 - eps : eps);
    z += post(i);
  }
  return post / z;
}

}  // namespace

TEST_CASE("uniform prior") {
  const auto p8 = init_posterior(8);
  CHECK((p8.probs - 0.125).abs().maxCoeff() == 0.0);
  const auto p1 = init_posterior(1);
  CHECK(p1.probs(0) == 1.0);
  CHECK(entropy(p1) == 0.0);
  CHECK(entropy(init_posterior(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(init_posterior(0), ConfigError);
}

TEST_CASE("yes answer keeps the consistent pair") {
  const std::vector<bool> red{true, true, false, false};
  const auto post = update_posterior(init_posterior(4), [&](Eigen::Index i) { return red[i]; },
                                     Answer::kYes, 0.0);
  CHECK(post.probs(0) == 0.5);
  CHECK(post.probs(1) == 0.5);
  CHECK(post.probs(2) == 0.0);
  CHECK(post.probs(3) == 0.0);
  CHECK(entropy(post) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("NA answers leave the posterior unchanged") {
  GuesserPosterior p{Eigen::Array3d(0.2, 0.5, 0.3)};
  const auto q = update_posterior(p, [](Eigen::Index) { return true; }, Answer::kNA, 0.1);
  CHECK((q.probs == p.probs).all());
}

TEST_CASE("noisy answers follow Bayes rule") {
  Rng rng(3);
  for (double eps : {0.05, 0.25, 0.49}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + static_cast<int>(uniform_index(rng, 9));
      Eigen::ArrayXd prior(n);
      for (int i = 0; i < n; ++i) prior(i) = 0.05 + uniform01(rng);
      prior /= prior.sum();
      std::vector<bool> sat(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) sat[static_cast<std::size_t>(i)] = uniform01(rng) < 0.5;
      const bool yes = uniform01(rng) < 0.5;
      const auto post = update_posterior({prior}, [&](Eigen::Index i) { return sat[i]; },
                                         yes ? Answer::kYes : Answer::kNo, eps);
      CHECK((post.probs - bayes_oracle(prior, sat, yes, eps)).abs().maxCoeff() <= 1e-12);
      CHECK(std::abs(post.probs.sum() - 1.0) <= 1e-9);
      CHECK((post.probs >= 0.0).all());
    }
  }
  // Near one half the evidence is almost uninformative.
  const auto near = update_posterior(init_posterior(4), [](Eigen::Index i) { return i < 1; },
                                     Answer::kYes, 0.49);
  CHECK((near.probs - 0.25).abs().maxCoeff() < 0.01);
}

TEST_CASE("epsilon bounds and contradictions") {
  const auto p = init_posterior(3);
  auto all = [](Eigen::Index) { return true; };
  CHECK_THROWS_AS(update_posterior(p, all, Answer::kYes, 0.5), DomainError);
  CHECK_THROWS_AS(update_posterior(p, all, Answer::kYes, -0.1), DomainError);
  CHECK_THROWS_AS(update_posterior(p, all, Answer::kNo, 0.0), DegenerateEvidenceError);
}

TEST_CASE("entropy examples") {
  CHECK(entropy(init_posterior(8)) == doctest::Approx(2.0794415416798357).epsilon(1e-14));
  CHECK(entropy({Eigen::Array3d(0.0, 1.0, 0.0)}) == 0.0);
  CHECK(entropy({Eigen::Array4d(0.5, 0.5, 0.0, 0.0)}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("stopping rule") {
  const GuesserPosterior point{Eigen::Array3d(0.0, 1.0, 0.0)};
  for (double eta : {0.0, 0.05, 3.0}) CHECK(should_stop(point, StoppingRule{eta}));
  CHECK_FALSE(should_stop(init_posterior(8), StoppingRule{0.05}));
  CHECK(should_stop(init_posterior(8), StoppingRule{std::log(8.0)}));
  // Disabled stopping is the empty rule, never true.
  CHECK_FALSE(should_stop(point, std::optional<StoppingRule>{}));
  CHECK_THROWS_AS(should_stop(point, StoppingRule{-0.1}), DomainError);
}

TEST_CASE("larger eta never stops later") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    GuesserPosterior p = init_posterior(8);
    std::vector<double> stream{entropy(p)};
    for (int round = 0; round < 5; ++round) {
      std::vector<bool> sat(8);
      for (auto&& s : sat) s = uniform01(rng) < 0.4;
      try {
        p = update_posterior(p, [&](Eigen::Index i) { return sat[i]; },
                             uniform01(rng) < 0.5 ? Answer::kYes : Answer::kNo, 0.1);
      } catch (const DegenerateEvidenceError&) {
        p = init_posterior(8);
      }
      stream.push_back(entropy(p));
    }
    auto first_stop = [&](double eta) {
      for (std::size_t t = 0; t < stream.size(); ++t) {
        if (stream[t] <= eta + kEntropySlack) return t;
      }
      return stream.size();
    };
    CHECK(first_stop(0.5) <= first_stop(0.05));
    CHECK(first_stop(0.05) <= first_stop(0.01));
  }
}

TEST_CASE("guess is the argmax with the lowest index on ties") {
  CHECK(guess({Eigen::Array3d(0.1, 0.7, 0.2)}) == 1);
  CHECK(guess(init_posterior(5)) == 0);
  CHECK(guess({Eigen::Array3d(0.2, 0.4, 0.4)}) == 1);
}
