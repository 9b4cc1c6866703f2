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
#include <vector>

#include "aggrobust/game.hpp"

namespace aggrobust {

/// Called once per iteration with (iteration, residual, current strategies).
using IterateObserver =
    std::function<void(long iteration, double residual, const Matrix& x)>;

struct SolverOptions {
  double tol = 1e-10;
  long max_iters = 1'000'000;
  /// Zero means "derive from the monotonicity certificate".
  double step_primal = 0.0;
  double step_dual = 0.0;
  /// Solve anyway when the certificate reports mu <= 0 (steps must be given).
  bool allow_nonmonotone = false;
  /// Finish with an exact solve on the identified active set (affine F).
  bool polish = true;
  IterateObserver observer;

  void validate() const;
};

struct VgneResult {
  StrategyProfile x_star;
  double lambda_star = 0.0;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Variational GNE of the game with coupling sum_i alpha_i^T x_i <= budget,
/// x >= 0, using aggregator weights `beta`.
VgneResult solve_vgne(const QuadraticPayoffParams& params, const Vector& beta,
                      double budget, const Matrix& alpha,
                      const SolverOptions& opts = {});

/// Same, simulating the black box with `config.beta_true`.
VgneResult solve_vgne(const GameConfig& config, const Matrix& alpha,
                      const SolverOptions& opts = {});

/// Max-norm of the unit-step natural residual of the Nash-KKT system:
///   x - P_+(x - (F(x) + lambda alpha)),  lambda - P_+(lambda + alpha.x - b).
double kkt_residual(const QuadraticPayoffParams& params, const Vector& beta,
                    double budget, const Matrix& alpha,
                    const StrategyProfile& x, double lambda);

double kkt_residual(const GameConfig& config, const Matrix& alpha,
                    const StrategyProfile& x, double lambda);

/// min over probes of F(x*)^T (probe - x*). Every probe must lie in
/// Omega_alpha (checked with absolute slack `feas_tol`).
double vi_gap(const GameConfig& config, const Matrix& alpha,
              const StrategyProfile& x_star,
              const std::vector<StrategyProfile>& probes,
              double feas_tol = 1e-9);

/// True iff x >= -tol and sum_i alpha_i^T x_i <= budget + tol.
bool in_coupling_set(const Matrix& alpha, double budget,
                     const StrategyProfile& x, double tol = 1e-9);

}  // namespace aggrobust
