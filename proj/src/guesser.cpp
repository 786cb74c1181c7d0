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

#include "infoseek/guesser.hpp"

#include <cmath>

#include "infoseek/errors.hpp"

namespace infoseek {

GuesserPosterior init_posterior(Eigen::Index num_objects) {
  if (num_objects < 1) throw ConfigError("init_posterior: empty object list");
  return {Eigen::ArrayXd::Constant(num_objects, 1.0 / static_cast<double>(num_objects))};
}

GuesserPosterior update_posterior(const GuesserPosterior& prior,
                                  const std::function<bool(Eigen::Index)>& satisfies,
                                  Answer answer, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) {
    throw DomainError("update_posterior: epsilon must lie in [0, 0.5)");
  }
  if (answer == Answer::kNA) return prior;
  const bool said_yes = answer == Answer::kYes;
  GuesserPosterior out = prior;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const bool agrees = satisfies(i) == said_yes;
    out.probs(i) *= agrees ? 1.0 - epsilon : epsilon;
  }
  const double mass = out.probs.sum();
  if (!(mass > 0.0)) throw DegenerateEvidenceError("update_posterior: evidence removed all mass");
  out.probs /= mass;
  return out;
}

double entropy(const GuesserPosterior& posterior) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < posterior.size(); ++i) {
    const double p = posterior.probs(i);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

bool should_stop(const GuesserPosterior& posterior, const StoppingRule& rule) {
  if (!(rule.eta >= 0.0)) throw DomainError("should_stop: eta must be >= 0");
  return entropy(posterior) <= rule.eta + kEntropySlack;
}

bool should_stop(const GuesserPosterior& posterior, const std::optional<StoppingRule>& rule) {
  return rule.has_value() && should_stop(posterior, *rule);
}

Eigen::Index guess(const GuesserPosterior& posterior) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < posterior.size(); ++i) {
    if (posterior.probs(i) > posterior.probs(best)) best = i;
  }
  return best;
}

}  // namespace infoseek
