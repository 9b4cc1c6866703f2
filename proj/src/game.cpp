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

#include "aggrobust/game.hpp"

#include <cmath>
#include <string>

namespace aggrobust {

namespace {

void check_family(const StrategyProfile& x, const QuadraticPayoffParams& p) {
  require(x.cols() == 1,
          "quadratic payoff family is defined for dim = 1, got dim = " +
              std::to_string(x.cols()));
  require(x.rows() == p.l.size() && p.h.size() == p.l.size(),
          "payoff coefficients must have one entry per player");
}

}  // namespace

void GameConfig::validate() const {
  require(players >= 1, "players: must be >= 1");
  require(dim >= 1, "dim: must be >= 1");
  require(std::isfinite(budget) && budget > 0.0, "budget: must be > 0");
  require(payoff.l.size() == players, "payoff.l: length must equal players");
  require(payoff.h.size() == players, "payoff.h: length must equal players");
  for (int i = 0; i < players; ++i) {
    require(std::isfinite(payoff.l[i]) && payoff.l[i] > 0.0,
            "payoff.l[" + std::to_string(i) + "]: must be > 0");
    require(std::isfinite(payoff.h[i]),
            "payoff.h[" + std::to_string(i) + "]: must be finite");
  }
  require(std::isfinite(payoff.q) && payoff.q >= 0.0, "payoff.q: must be >= 0");
  require(std::isfinite(payoff.p0), "payoff.p0: must be finite");
  if (beta_true) {
    require(beta_true->size() == players,
            "beta_true: length must equal players");
    require(beta_true->allFinite(), "beta_true: must be finite");
  }
}

Matrix AffineGradient::evaluate(const Vector& beta) const {
  require(beta.size() == coeff.cols(), "beta length does not match game");
  const Vector flat = coeff * beta;
  Matrix out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int c = 0; c < a.cols(); ++c) out(i, c) += flat[i * a.cols() + c];
  return out;
}

Vector aggregate(const StrategyProfile& x, const Vector& beta) {
  require(x.rows() == beta.size(),
          "aggregate: beta has " + std::to_string(beta.size()) +
              " entries but profile has " + std::to_string(x.rows()) +
              " players");
  return x.transpose() * beta;
}

double payoff_value(int player, const StrategyProfile& x,
                    const QuadraticPayoffParams& params, const Vector& beta) {
  check_family(x, params);
  require(player >= 0 && player < x.rows(), "player index out of range");
  const double n_players = static_cast<double>(x.rows());
  const double sigma = aggregate(x, beta)[0];
  const double price = params.q * n_players * sigma + params.p0;
  const double dev = x(player, 0) - params.h[player];
  return params.l[player] * dev * dev + price * x(player, 0);
}

Matrix pseudo_gradient(const StrategyProfile& x, const Vector& beta,
                       const QuadraticPayoffParams& params) {
  check_family(x, params);
  require(beta.size() == x.rows(), "pseudo_gradient: beta length mismatch");
  const int N = static_cast<int>(x.rows());
  const double qN = params.q * N;
  const double sigma = x.col(0).dot(beta);
  Matrix F(N, 1);
  for (int i = 0; i < N; ++i) {
    // d/dx_i of l_i (x_i - h_i)^2 + (qN sigma + p0) x_i
    F(i, 0) = 2.0 * params.l[i] * (x(i, 0) - params.h[i]) + qN * sigma +
              params.p0 + qN * beta[i] * x(i, 0);
  }
  return F;
}

AffineGradient affine_decomposition(const StrategyProfile& x,
                                    const QuadraticPayoffParams& params) {
  check_family(x, params);
  const int N = static_cast<int>(x.rows());
  const double qN = params.q * N;
  AffineGradient g;
  g.a.resize(N, 1);
  g.coeff.resize(N, N);
  for (int i = 0; i < N; ++i) {
    g.a(i, 0) = 2.0 * params.l[i] * (x(i, 0) - params.h[i]) + params.p0;
    for (int j = 0; j < N; ++j)
      g.coeff(i, j) = (j == i) ? 2.0 * qN * x(i, 0) : qN * x(j, 0);
  }
  return g;
}

Matrix pseudo_gradient_jacobian(const QuadraticPayoffParams& params,
                                const Vector& beta) {
  const int N = params.players();
  require(beta.size() == N, "jacobian: beta length mismatch");
  const double qN = params.q * N;
  Matrix J(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      J(i, j) = (i == j) ? 2.0 * params.l[i] + 2.0 * qN * beta[i] : qN * beta[j];
  return J;
}

MonotonicityCertificate monotonicity_certificate(
    const QuadraticPayoffParams& params, const Vector& beta,
    double /*x_domain_bound*/) {
  const Matrix J = pseudo_gradient_jacobian(params, beta);
  const Matrix S = 0.5 * (J + J.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  Eigen::JacobiSVD<Matrix> svd(J);
  return {eig.eigenvalues().minCoeff(), svd.singularValues()(0)};
}

}  // namespace aggrobust
