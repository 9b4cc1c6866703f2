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

#include "aggrobust/robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aggrobust/lp.hpp"

namespace aggrobust {

RobustGame build_robust_counterpart(const QuadraticPayoffParams& params,
                                    const Vector& beta_hat,
                                    const UncertaintyProfile& profile,
                                    double budget) {
  require(beta_hat.size() == params.players(),
          "robust counterpart: beta_hat length must equal players");
  require(beta_hat.allFinite(), "robust counterpart: beta_hat must be finite");
  require(budget > 0.0, "robust counterpart: budget must be > 0");
  require(!profile.sets.empty(), "robust counterpart: empty uncertainty profile");
  profile.validate(params.players(), profile.sets[0].dim());
  for (int i = 0; i < profile.players(); ++i)
    require(slater_check(profile.sets[i]).feasible,
            "robust counterpart: uncertainty set " + std::to_string(i) + " is empty");
  return RobustGame{params, beta_hat, profile, budget};
}

double rgne_residual(const RobustGame& g, const StrategyProfile& x,
                     const std::vector<Vector>& y, double mu,
                     const std::vector<Vector>& omega) {
  const int N = g.players();
  const Matrix F = pseudo_gradient(x, g.beta_hat, g.params);
  double worst = 0.0;
  double spend = 0.0;
  for (int i = 0; i < N; ++i) {
    const Polyhedron& A = g.profile.sets[i];
    const Vector xi = x.row(i).transpose();
    const Vector gx = F.row(i).transpose() - omega[i];
    worst = std::max(worst, (xi - (xi - gx).cwiseMax(0.0)).cwiseAbs().maxCoeff());
    const Vector gy = mu * A.d() + A.D() * omega[i];
    worst = std::max(worst, (y[i] - (y[i] - gy).cwiseMax(0.0)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (A.D().transpose() * y[i] - xi).cwiseAbs().maxCoeff());
    spend += A.d().dot(y[i]);
  }
  worst = std::max(worst, std::abs(mu - std::max(0.0, mu + spend - g.budget)));
  return worst;
}

RgneResult solve_rgne(const RobustGame& g, const SolverOptions& opts) {
  opts.validate();
  const int N = g.players();
  const int n = g.dim();
  require(n == 1, "solve_rgne: quadratic family requires dim = 1");

  const MonotonicityCertificate cert = monotonicity_certificate(g.params, g.beta_hat);
  if (cert.mu <= 0.0 && !opts.allow_nonmonotone)
    throw ValidationError("solve_rgne: pseudo-gradient is not strongly monotone");
  double tau = opts.step_primal;
  double rho = opts.step_dual;
  const double theta = cert.mu > 0.0 ? cert.mu / (cert.L * cert.L) : 0.0;
  if (tau == 0.0) {
    require(theta > 0.0, "solve_rgne: explicit steps needed for a non-monotone game");
    tau = theta;
  }
  if (rho == 0.0) {
    // Norm of the constraint map (x, y) -> (sum d^T y, D^T y - x).
    int ny = 0;
    for (const auto& s : g.profile.sets) ny += s.rows();
    Matrix K = Matrix::Zero(1 + N * n, N * n + ny);
    int off = N * n;
    for (int i = 0; i < N; ++i) {
      const Polyhedron& A = g.profile.sets[i];
      K.block(0, off, 1, A.rows()) = A.d().transpose();
      K.block(1 + i * n, off, n, A.rows()) = A.D().transpose();
      K.block(1 + i * n, i * n, n, n) = -Matrix::Identity(n, n);
      off += A.rows();
    }
    const double knorm = Eigen::JacobiSVD<Matrix>(K).singularValues()(0);
    const double margin = 1.0 / tau - (theta > 0.0 ? 1.0 / (2.0 * theta) : 0.0);
    rho = margin > 0.0 ? 0.5 * margin / (knorm * knorm) : tau;
  }

  StrategyProfile x = StrategyProfile::Zero(N, n);
  std::vector<Vector> y(N), omega(N, Vector::Zero(n));
  for (int i = 0; i < N; ++i) y[i] = Vector::Zero(g.profile.sets[i].rows());
  double mu = 0.0;

  // Complementarity of the budget row, required to 10 tol on top of the
  // natural residual.
  auto complementarity = [&](const std::vector<Vector>& yy, double m) {
    double spend = 0.0;
    for (int i = 0; i < N; ++i) spend += g.profile.sets[i].d().dot(yy[i]);
    return std::abs(m * (spend - g.budget));
  };
  auto score = [&](double res, double comp) { return std::max(res, comp / 10.0); };

  RgneResult best;
  best.residual = rgne_residual(g, x, y, mu, omega);
  double best_score = score(best.residual, complementarity(y, mu));
  best.x_star = x;
  best.y_star = y;
  best.omega_star = omega;
  long it = 0;
  double residual = best.residual;
  while (best_score > opts.tol && it < opts.max_iters) {
    const Matrix F = pseudo_gradient(x, g.beta_hat, g.params);
    StrategyProfile x_next(N, n);
    std::vector<Vector> y_next(N);
    double spend_reflected = 0.0;
    for (int i = 0; i < N; ++i) {
      const Polyhedron& A = g.profile.sets[i];
      const Vector gx = F.row(i).transpose() - omega[i];
      x_next.row(i) = (x.row(i).transpose() - tau * gx).cwiseMax(0.0).transpose();
      y_next[i] = (y[i] - tau * (mu * A.d() + A.D() * omega[i])).cwiseMax(0.0);
      spend_reflected += A.d().dot(2.0 * y_next[i] - y[i]);
    }
    mu = std::max(0.0, mu + rho * (spend_reflected - g.budget));
    for (int i = 0; i < N; ++i) {
      const Polyhedron& A = g.profile.sets[i];
      const Vector gap = A.D().transpose() * (2.0 * y_next[i] - y[i]) -
                         (2.0 * x_next.row(i) - x.row(i)).transpose();
      omega[i] += rho * gap;
    }
    x = std::move(x_next);
    y = std::move(y_next);
    ++it;
    residual = rgne_residual(g, x, y, mu, omega);
    if (opts.observer) opts.observer(it, residual, x);
    if (!std::isfinite(residual)) break;
    const double sc = score(residual, complementarity(y, mu));
    if (sc < best_score) {
      best_score = sc;
      best.residual = residual;
      best.x_star = x;
      best.y_star = y;
      best.mu_star = mu;
      best.omega_star = omega;
    }
  }
  best.iterations = it;
  best.converged = best_score <= opts.tol;
  return best;
}

SupportValue support_value(const Polyhedron& p, const Vector& x) {
  require(x.size() == p.dim(), "support_value: dimension mismatch");
  SupportValue sv;
  if (const auto box = p.as_box()) {
    const auto& [lo, hi] = *box;
    sv.argmax = Vector(x.size());
    for (int c = 0; c < x.size(); ++c) sv.argmax[c] = x[c] > 0.0 ? hi[c] : lo[c];
    sv.value = sv.argmax.dot(x);
    return sv;
  }

  // Bounded iff x is a nonnegative combination of the rows of D.
  {
    LpProblem lp;
    for (int r = 0; r < p.rows(); ++r)
      lp.add_variable("y" + std::to_string(r), 0.0, kInf);
    for (int c = 0; c < p.dim(); ++c) {
      std::vector<std::pair<int, double>> row;
      for (int r = 0; r < p.rows(); ++r) row.emplace_back(r, p.D()(r, c));
      lp.add_row(row, RowSense::kEqual, x[c]);
    }
    const LpSolution s = solve_lp(lp);
    if (s.status == LpStatus::kInfeasible)
      throw ValidationError("support_value: unbounded in the direction of x");
    if (s.status != LpStatus::kOptimal)
      throw NumericalError("support_value: boundedness check failed");
  }

  // Vertex enumeration over n-subsets of rows.
  const int n = p.dim(), m = p.rows();
  bool found = false;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (n <= m) {
    Matrix Ds(n, n);
    Vector ds(n);
    for (int i = 0; i < n; ++i) {
      Ds.row(i) = p.D().row(pick[i]);
      ds[i] = p.d()[pick[i]];
    }
    Eigen::FullPivLU<Matrix> lu(Ds);
    if (lu.isInvertible()) {
      const Vector v = lu.solve(ds);
      if (p.contains(v, 1e-9)) {
        const double val = v.dot(x);
        if (!found || val > sv.value) {
          sv.value = val;
          sv.argmax = v;
          found = true;
        }
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == m - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  if (!found)
    throw ValidationError("support_value: polyhedron has no vertices");
  return sv;
}

RobustFeasibilityReport verify_robust_feasibility(
    const StrategyProfile& x, const UncertaintyProfile& profile, double budget,
    std::size_t trials, std::uint64_t seed) {
  require(x.rows() == profile.players(), "verify_robust_feasibility: shape mismatch");
  RobustFeasibilityReport rep;
  for (int i = 0; i < profile.players(); ++i)
    rep.max_lhs += support_value(profile.sets[i], x.row(i).transpose()).value;
  rep.sampled_max = -kInf;
  for (std::size_t t = 0; t < trials; ++t) {
    const Matrix alpha = sample_alpha_at(profile, seed, t);
    const double lhs = alpha.cwiseProduct(x).sum();
    if (lhs > rep.sampled_max) {
      rep.sampled_max = lhs;
      rep.worst_sample = alpha;
    }
  }
  if (trials == 0) rep.sampled_max = 0.0;
  rep.pass = rep.max_lhs <= budget + 1e-8 && rep.sampled_max <= budget + 1e-8;
  return rep;
}

}  // namespace aggrobust
