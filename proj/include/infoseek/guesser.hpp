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

// Goal posterior p(o | dialogue) by exact Bayesian filtering over the
// candidate objects, its entropy, the entropy stopping rule and the final
// guess.

#ifndef INFOSEEK_GUESSER_HPP_
#define INFOSEEK_GUESSER_HPP_

#include <Eigen/Core>

#include <functional>
#include <optional>

namespace infoseek {

enum class Answer { kYes, kNo, kNA };

struct GuesserPosterior {
  Eigen::ArrayXd probs;  // over object indices 0..N_o-1

  Eigen::Index size() const { return probs.size(); }
};

// Stop once the posterior entropy (nats) is at most eta. Disabled stopping
// is an empty std::optional<StoppingRule>, never a huge eta.
// Absorbs summation rounding so a uniform posterior over N objects
// satisfies eta = ln N exactly.
inline constexpr double kEntropySlack = 1e-12;

struct StoppingRule {
  double eta = 0.05;
};

GuesserPosterior init_posterior(Eigen::Index num_objects);

// Likelihood (1 - epsilon) for objects where `consistent(i)` agrees with
// the answer and epsilon otherwise; kNA leaves the posterior unchanged.
// Throws DegenerateEvidenceError if no mass survives.
GuesserPosterior update_posterior(const GuesserPosterior& prior,
                                  const std::function<bool(Eigen::Index)>& satisfies,
                                  Answer answer, double epsilon);

double entropy(const GuesserPosterior& posterior);
bool should_stop(const GuesserPosterior& posterior, const StoppingRule& rule);
bool should_stop(const GuesserPosterior& posterior, const std::optional<StoppingRule>& rule);
// argmax, lowest index on ties.
Eigen::Index guess(const GuesserPosterior& posterior);

}  // namespace infoseek

#endif  // INFOSEEK_GUESSER_HPP_
