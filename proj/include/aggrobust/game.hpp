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

#include <optional>

#include "aggrobust/common.hpp"

namespace aggrobust {

/// Coefficients of the demand-response payoff
///   J_i = l_i (x_i - h_i)^2 + (q N sigma(x) + p0) x_i.
struct QuadraticPayoffParams {
  Vector l;  ///< curvature, strictly positive
  Vector h;  ///< nominal demand
  double q = 0.0;
  double p0 = 0.0;

  int players() const { return static_cast<int>(l.size()); }
};

struct GameConfig {
  int players = 0;
  int dim = 1;
  double budget = 0.0;
  QuadraticPayoffParams payoff;
  std::optional<Vector> beta_true;

  /// Throws ValidationError on the first violated invariant.
  void validate() const;
};

/// F(x; beta) = a + B beta.  `coeff` is laid out as N*n rows by N columns,
/// row (i*n + c) holding the beta coefficients of F_{i,c}.
struct AffineGradient {
  Matrix a;      // N x n
  Matrix coeff;  // (N*n) x N

  int players() const { return static_cast<int>(a.rows()); }
  int dim() const { return static_cast<int>(a.cols()); }

  /// a + B beta, reshaped to N x n.
  Matrix evaluate(const Vector& beta) const;
};

struct MonotonicityCertificate {
  double mu = 0.0;  ///< min eigenvalue of the symmetric Jacobian part
  double L = 0.0;   ///< spectral norm of the Jacobian
};

/// sigma(x) = sum_i beta_i x_i.
Vector aggregate(const StrategyProfile& x, const Vector& beta);

double payoff_value(int player, const StrategyProfile& x,
                    const QuadraticPayoffParams& params, const Vector& beta);

/// Stacked partial gradients of each player's payoff w.r.t. its own strategy.
Matrix pseudo_gradient(const StrategyProfile& x, const Vector& beta,
                       const QuadraticPayoffParams& params);

AffineGradient affine_decomposition(const StrategyProfile& x,
                                    const QuadraticPayoffParams& params);

/// Constant Jacobian dF/dx of the quadratic family (N x N, n = 1).
Matrix pseudo_gradient_jacobian(const QuadraticPayoffParams& params,
                                const Vector& beta);

/// `x_domain_bound` is accepted for interface stability; the quadratic
/// family has a constant Jacobian so the certificate is global.
MonotonicityCertificate monotonicity_certificate(
    const QuadraticPayoffParams& params, const Vector& beta,
    double x_domain_bound = 0.0);

}  // namespace aggrobust
