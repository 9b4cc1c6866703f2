// Copyright 2026 The aggrobust Authors
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

#pragma once

#include <cstdint>

#include "aggrobust/game.hpp"
#include "aggrobust/uncertainty.hpp"
#include "aggrobust/vgne.hpp"

namespace aggrobust {

struct BoundReport {
  double epsilon = 0.1;
  long M = 0;
  int N = 0;  ///< players; the learned decision (beta, delta) has N + 1 entries
  double delta_bound = 1.0;
};

/// Probability that a Binomial(M, epsilon) variable is at most N, i.e. the
/// confidence bound on P(violation > epsilon) after M scenarios. Accumulated
/// in log space.
double binomial_tail(long M, int N, double epsilon);

BoundReport make_bound_report(long M, int N, double epsilon);

/// Smallest M with binomial_tail(M, N, epsilon) <= delta_target.
long min_samples(double epsilon, double delta_target, int N);

struct ViolationEstimate {
  double empirical_v = 0.0;
  long trials = 0;
  long violations = 0;
  double ci_lo = 0.0;  ///< Wilson 95%
  double ci_hi = 1.0;
};

/// Wilson score interval at 95%.
ViolationEstimate wilson_estimate(long violations, long trials);

/// Fraction of fresh parameter draws whose equilibrium rejects (beta, delta).
/// Fresh labels come from the black box `config.beta_true`.
ViolationEstimate estimate_violation(const Vector& beta, double delta,
                                     const GameConfig& config,
                                     const UncertaintyProfile& profile,
                                     long trials, std::uint64_t seed,
                                     const SolverOptions& opts = {},
                                     unsigned threads = 1);

}  // namespace aggrobust
