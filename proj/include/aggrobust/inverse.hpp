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

#include <functional>
#include <string>
#include <vector>

#include "aggrobust/game.hpp"
#include "aggrobust/lp.hpp"
#include "aggrobust/uncertainty.hpp"

namespace aggrobust {

/// Feasible range of the scalar gamma <= 0 in the (relaxed) inverse relation
///   F^T x* - gamma b <= delta,   F_i - gamma alpha_i >= 0.
struct GammaInterval {
  double lo = -kInf;
  double hi = 0.0;
  bool feasible = false;
};

GammaInterval feasible_gamma_interval(const Matrix& F_vals,
                                      const StrategyProfile& x_star,
                                      const Matrix& alpha, double budget,
                                      double delta);

/// Maps an observed equilibrium to the affine-in-beta pseudo-gradient there.
using GradientFamily = std::function<AffineGradient(const StrategyProfile&)>;

GradientFamily quadratic_family(const QuadraticPayoffParams& params);

enum class SlackNorm { kInf, kL1 };
const char* to_string(SlackNorm n);
SlackNorm parse_slack_norm(const std::string& s);

enum class TieBreak { kAuto, kAlways, kNever };

struct LearnOptions {
  SlackNorm norm = SlackNorm::kInf;
  double beta_lo = -10.0;
  double beta_hi = 10.0;
  TieBreak tie_break = TieBreak::kAuto;
};

/// Columns are named beta_<i>, gamma_<k> and delta (inf) or delta_<k> (l1).
LpProblem build_inverse_lp(const Dataset& dataset, const GradientFamily& family,
                           double budget, SlackNorm norm, double beta_lo,
                           double beta_hi);

struct LearnResult {
  Vector beta_hat;
  Vector gamma;
  /// One entry for the inf-norm, one per sample for l1.
  Vector delta;
  SlackNorm norm = SlackNorm::kInf;
  std::string status = "optimal";
  bool tie_break_applied = false;
  double objective = 0.0;
  /// Nonbasic LP columns with zero reduced cost at the optimum; an upper
  /// bound on the dimension of the optimal face (0 means unique).
  int optimal_face_dim_hint = 0;
  long lp_iterations = 0;

  /// The scalar slack: delta for inf, max_k delta_k for l1.
  double delta_star() const;
};

/// Solves the inverse LP and, when requested, selects the minimum-norm
/// (beta, gamma) on the optimal face. Throws ValidationError when the LP is
/// infeasible or unbounded and NumericalError on solver breakdown.
LearnResult learn_weights(const Dataset& dataset, const GradientFamily& family,
                          double budget, const LearnOptions& opts = {});

/// True iff (beta, delta) admits a gamma for data point `p`. Both the slack
/// and the interval comparison allow `rel_tol` times the magnitude of the
/// terms involved, so rounding in the evaluation cannot flip the verdict.
bool in_feasibility_set(const DataPoint& p, const GradientFamily& family,
                        double budget, const Vector& beta, double delta,
                        double rel_tol = 1e-12);

/// Mean estimated error (1/N) ||beta_hat - beta||_2.
double mee(const Vector& beta_hat, const Vector& beta_true);

/// min ||z||^2 s.t. G z <= h (dual active-set). Exposed for testing.
struct MinNormResult {
  Vector z;
  bool converged = false;
  int iterations = 0;
};
MinNormResult min_norm_point(const Matrix& G, const Vector& h,
                             double tol = 1e-11);

}  // namespace aggrobust
