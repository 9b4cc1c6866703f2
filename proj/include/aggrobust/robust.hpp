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
#include <vector>

#include "aggrobust/game.hpp"
#include "aggrobust/uncertainty.hpp"
#include "aggrobust/vgne.hpp"

namespace aggrobust {

/// Deterministic counterpart of the uncertain game: player i chooses
/// (x_i >= 0, y_i >= 0) subject to sum_i d_i^T y_i <= b and D_i^T y_i = x_i,
/// with the aggregator built from the learned weights.
struct RobustGame {
  QuadraticPayoffParams params;
  Vector beta_hat;
  UncertaintyProfile profile;
  double budget = 0.0;

  int players() const { return params.players(); }
  int dim() const { return profile.sets.empty() ? 0 : profile.sets[0].dim(); }
};

RobustGame build_robust_counterpart(const QuadraticPayoffParams& params,
                                    const Vector& beta_hat,
                                    const UncertaintyProfile& profile,
                                    double budget);

struct RgneResult {
  StrategyProfile x_star;
  std::vector<Vector> y_star;
  double mu_star = 0.0;
  std::vector<Vector> omega_star;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Max-norm natural residual of the first-order system of the counterpart.
double rgne_residual(const RobustGame& g, const StrategyProfile& x,
                     const std::vector<Vector>& y, double mu,
                     const std::vector<Vector>& omega);

RgneResult solve_rgne(const RobustGame& g, const SolverOptions& opts = {});

struct SupportValue {
  double value = 0.0;
  Vector argmax;
};

/// max { alpha^T x : alpha in p }. Throws ValidationError when unbounded.
SupportValue support_value(const Polyhedron& p, const Vector& x);

struct RobustFeasibilityReport {
  double max_lhs = 0.0;      ///< sum_i support_value(A_i, x_i)
  double sampled_max = 0.0;  ///< largest sum_i alpha_i^T x_i over the samples
  Matrix worst_sample;
  bool pass = false;
};

RobustFeasibilityReport verify_robust_feasibility(
    const StrategyProfile& x, const UncertaintyProfile& profile, double budget,
    std::size_t trials, std::uint64_t seed);

}  // namespace aggrobust
