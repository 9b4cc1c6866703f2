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

#include "aggrobust/vgne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aggrobust {

namespace {

double coupling(const Matrix& alpha, const StrategyProfile& x) {
  return alpha.cwiseProduct(x).sum();
}

void check_instance(const QuadraticPayoffParams& params, const Vector& beta,
                    double budget, const Matrix& alpha) {
  require(alpha.rows() == params.players() && alpha.cols() == 1,
          "alpha must be N x 1 for the quadratic family");
  require(beta.size() == params.players(), "beta length mismatch");
  require(alpha.allFinite(), "alpha must be finite");
  require(std::isfinite(budget), "budget must be finite");
}

// Exact solve of the KKT system on the active set read off (x, lambda).
// F is affine with constant Jacobian J, so one linear solve suffices.
bool polish(const QuadraticPayoffParams& params, const Vector& beta,
            double budget, const Matrix& alpha, StrategyProfile& x,
            double& lambda) {
  const int N = params.players();
  const Matrix F = pseudo_gradient(x, beta, params);
  const Matrix J = pseudo_gradient_jacobian(params, beta);

  std::vector<int> free;
  for (int i = 0; i < N; ++i)
    if (x(i, 0) - (F(i, 0) + lambda * alpha(i, 0)) > 0.0) free.push_back(i);
  const bool budget_active = lambda + (coupling(alpha, x) - budget) > 0.0;

  const int nf = static_cast<int>(free.size());
  const int dim = nf + (budget_active ? 1 : 0);
  if (dim == 0) {
    x.setZero();
    lambda = 0.0;
    return true;
  }
  // F(z) = F(x) + J (z - x) restricted to free coordinates, others pinned at 0.
  const Vector c = F.col(0) - J * x.col(0);
  Matrix K = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  for (int r = 0; r < nf; ++r) {
    const int i = free[r];
    for (int s = 0; s < nf; ++s) K(r, s) = J(i, free[s]);
    if (budget_active) K(r, nf) = alpha(i, 0);
    rhs[r] = -c[i];
  }
  if (budget_active) {
    for (int s = 0; s < nf; ++s) K(nf, s) = alpha(free[s], 0);
    rhs[nf] = budget;
  }
  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible()) return false;
  const Vector sol = lu.solve(rhs);
  if (!sol.allFinite()) return false;

  StrategyProfile z = StrategyProfile::Zero(N, 1);
  for (int r = 0; r < nf; ++r) z(free[r], 0) = sol[r];
  x = z.cwiseMax(0.0);
  lambda = budget_active ? std::max(0.0, sol[nf]) : 0.0;
  return true;
}

}  // namespace

void SolverOptions::validate() const {
  require(tol > 0.0, "solver tol must be > 0");
  require(max_iters > 0, "solver max_iters must be > 0");
  require(step_primal >= 0.0 && step_dual >= 0.0, "solver steps must be >= 0");
}

bool in_coupling_set(const Matrix& alpha, double budget,
                     const StrategyProfile& x, double tol) {
  if (x.rows() != alpha.rows() || x.cols() != alpha.cols()) return false;
  if (!x.allFinite() || x.minCoeff() < -tol) return false;
  return coupling(alpha, x) <= budget + tol;
}

double kkt_residual(const QuadraticPayoffParams& params, const Vector& beta,
                    double budget, const Matrix& alpha,
                    const StrategyProfile& x, double lambda) {
  check_instance(params, beta, budget, alpha);
  require(lambda >= 0.0, "kkt_residual: lambda must be >= 0");
  const Matrix F = pseudo_gradient(x, beta, params);
  const Matrix g = F + lambda * alpha;
  const double primal = (x - (x - g).cwiseMax(0.0)).cwiseAbs().maxCoeff();
  const double dual =
      std::abs(lambda - std::max(0.0, lambda + coupling(alpha, x) - budget));
  return std::max(primal, dual);
}

double kkt_residual(const GameConfig& config, const Matrix& alpha,
                    const StrategyProfile& x, double lambda) {
  require(config.beta_true.has_value(), "kkt_residual: beta_true is required");
  return kkt_residual(config.payoff, *config.beta_true, config.budget, alpha, x,
                      lambda);
}

VgneResult solve_vgne(const QuadraticPayoffParams& params, const Vector& beta,
                      double budget, const Matrix& alpha,
                      const SolverOptions& opts) {
  opts.validate();
  check_instance(params, beta, budget, alpha);
  const int N = params.players();

  double tau = opts.step_primal;
  double rho = opts.step_dual;
  const MonotonicityCertificate cert = monotonicity_certificate(params, beta);
  if (cert.mu <= 0.0) {
    if (!opts.allow_nonmonotone)
      throw ValidationError(
          "pseudo-gradient is not strongly monotone (mu = " +
          std::to_string(cert.mu) + "); set allow_nonmonotone to override");
    require(tau > 0.0 && rho > 0.0,
            "non-monotone solve requires explicit step sizes");
  }
  // Preconditioned forward-backward: with cocoercivity theta = mu / L^2 the
  // iteration converges when (1/tau - 1/(2 theta)) / rho > |alpha|^2.
  const double theta = cert.mu > 0.0 ? cert.mu / (cert.L * cert.L) : 0.0;
  if (tau == 0.0) tau = theta;
  if (rho == 0.0) {
    const double margin = 1.0 / tau - 1.0 / (2.0 * theta);
    const double a2 = std::max(alpha.squaredNorm(), 1e-300);
    rho = margin > 0.0 ? 0.5 * margin / a2 : tau;
  }

  VgneResult res;
  StrategyProfile x = StrategyProfile::Zero(N, 1);
  double lambda = 0.0;
  long it = 0;
  double residual = kkt_residual(params, beta, budget, alpha, x, lambda);
  double best_residual = residual;
  StrategyProfile best_x = x;
  double best_lambda = lambda;

  while (residual > opts.tol && it < opts.max_iters) {
    const Matrix F = pseudo_gradient(x, beta, params);
    const StrategyProfile x_next = (x - tau * (F + lambda * alpha)).cwiseMax(0.0);
    const double reflected = coupling(alpha, 2.0 * x_next - x);
    lambda = std::max(0.0, lambda + rho * (reflected - budget));
    x = x_next;
    ++it;
    residual = kkt_residual(params, beta, budget, alpha, x, lambda);
    if (opts.observer) opts.observer(it, residual, x);
    if (residual < best_residual) {
      best_residual = residual;
      best_x = x;
      best_lambda = lambda;
    }
    if (!std::isfinite(residual)) break;
  }

  x = best_x;
  lambda = best_lambda;
  residual = best_residual;
  if (opts.polish) {
    StrategyProfile px = x;
    double plambda = lambda;
    if (polish(params, beta, budget, alpha, px, plambda)) {
      const double pres = kkt_residual(params, beta, budget, alpha, px, plambda);
      if (pres < residual) {
        x = px;
        lambda = plambda;
        residual = pres;
      }
    }
  }

  res.x_star = x;
  res.lambda_star = lambda;
  res.residual = residual;
  res.iterations = it;
  res.converged = residual <= opts.tol;
  return res;
}

VgneResult solve_vgne(const GameConfig& config, const Matrix& alpha,
                      const SolverOptions& opts) {
  require(config.beta_true.has_value(),
          "solve_vgne: config has no beta_true to simulate the aggregator");
  return solve_vgne(config.payoff, *config.beta_true, config.budget, alpha,
                    opts);
}

double vi_gap(const GameConfig& config, const Matrix& alpha,
              const StrategyProfile& x_star,
              const std::vector<StrategyProfile>& probes, double feas_tol) {
  require(config.beta_true.has_value(), "vi_gap: beta_true is required");
  require(x_star.allFinite(), "vi_gap: x_star must be finite");
  const Matrix F = pseudo_gradient(x_star, *config.beta_true, config.payoff);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < probes.size(); ++p) {
    if (!in_coupling_set(alpha, config.budget, probes[p], feas_tol))
      throw ValidationError("vi_gap: probe " + std::to_string(p) +
                            " is outside the coupling set");
    gap = std::min(gap, F.cwiseProduct(probes[p] - x_star).sum());
  }
  return gap;
}

}  // namespace aggrobust
