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

#include "aggrobust/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aggrobust {

GammaInterval feasible_gamma_interval(const Matrix& F_vals,
                                      const StrategyProfile& x_star,
                                      const Matrix& alpha, double budget,
                                      double delta) {
  require(budget > 0.0, "feasible_gamma_interval: budget must be > 0");
  require(delta >= 0.0, "feasible_gamma_interval: delta must be >= 0");
  require(F_vals.rows() == x_star.rows() && F_vals.cols() == x_star.cols() &&
              alpha.rows() == x_star.rows() && alpha.cols() == x_star.cols(),
          "feasible_gamma_interval: shape mismatch");
  GammaInterval g;
  g.lo = (F_vals.cwiseProduct(x_star).sum() - delta) / budget;
  g.hi = 0.0;
  bool blocked = false;
  for (int i = 0; i < alpha.rows(); ++i) {
    for (int c = 0; c < alpha.cols(); ++c) {
      const double a = alpha(i, c), f = F_vals(i, c);
      if (a > 0.0) g.hi = std::min(g.hi, f / a);
      else if (a < 0.0) g.lo = std::max(g.lo, f / a);
      else if (f < 0.0) blocked = true;
    }
  }
  if (blocked) g.lo = kInf;
  g.feasible = g.lo <= g.hi;
  return g;
}

GradientFamily quadratic_family(const QuadraticPayoffParams& params) {
  return [params](const StrategyProfile& x) {
    return affine_decomposition(x, params);
  };
}

const char* to_string(SlackNorm n) { return n == SlackNorm::kInf ? "inf" : "l1"; }

SlackNorm parse_slack_norm(const std::string& s) {
  if (s == "inf") return SlackNorm::kInf;
  if (s == "l1") return SlackNorm::kL1;
  throw ValidationError("norm must be 'inf' or 'l1', got '" + s + "'");
}

double LearnResult::delta_star() const {
  return delta.size() ? delta.maxCoeff() : 0.0;
}

LpProblem build_inverse_lp(const Dataset& dataset, const GradientFamily& family,
                           double budget, SlackNorm norm, double beta_lo,
                           double beta_hi) {
  require(dataset.M() > 0, "inverse LP: dataset is empty");
  require(static_cast<bool>(family), "inverse LP: no gradient family given");
  require(budget > 0.0, "inverse LP: budget must be > 0");
  require(beta_lo <= beta_hi, "inverse LP: beta bounds are inverted");
  dataset.validate();
  const int N = static_cast<int>(dataset.points[0].x_star.rows());
  const int M = static_cast<int>(dataset.M());

  LpProblem lp;
  std::vector<int> beta(N), gamma(M), delta;
  for (int i = 0; i < N; ++i)
    beta[i] = lp.add_variable("beta_" + std::to_string(i + 1), beta_lo, beta_hi);
  for (int k = 0; k < M; ++k)
    gamma[k] = lp.add_variable("gamma_" + std::to_string(k + 1), -kInf, 0.0);
  if (norm == SlackNorm::kInf) {
    delta.push_back(lp.add_variable("delta", 0.0, kInf, 1.0));
  } else {
    for (int k = 0; k < M; ++k)
      delta.push_back(lp.add_variable("delta_" + std::to_string(k + 1), 0.0, kInf, 1.0));
  }

  for (int k = 0; k < M; ++k) {
    const DataPoint& p = dataset.points[k];
    const AffineGradient g = family(p.x_star);
    require(g.players() == N && g.coeff.cols() == N,
            "inverse LP: gradient family shape mismatch");
    const int n = g.dim();
    const int dk = norm == SlackNorm::kInf ? delta[0] : delta[k];

    // (a + B beta)^T x* - gamma_k b - delta <= 0
    std::vector<std::pair<int, double>> row;
    double a_dot_x = 0.0;
    for (int j = 0; j < N; ++j) {
      double coef = 0.0;
      for (int i = 0; i < N; ++i)
        for (int c = 0; c < n; ++c) coef += p.x_star(i, c) * g.coeff(i * n + c, j);
      row.emplace_back(beta[j], coef);
    }
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < n; ++c) a_dot_x += g.a(i, c) * p.x_star(i, c);
    row.emplace_back(gamma[k], -budget);
    row.emplace_back(dk, -1.0);
    lp.add_row(row, RowSense::kLessEqual, -a_dot_x);

    // a_i + (B beta)_i - gamma_k alpha_i >= 0
    for (int i = 0; i < N; ++i) {
      for (int c = 0; c < n; ++c) {
        std::vector<std::pair<int, double>> comp;
        for (int j = 0; j < N; ++j) comp.emplace_back(beta[j], g.coeff(i * n + c, j));
        comp.emplace_back(gamma[k], -p.alpha(i, c));
        lp.add_row(comp, RowSense::kGreaterEqual, -g.a(i, c));
      }
    }
  }
  return lp;
}

MinNormResult min_norm_point(const Matrix& G_in, const Vector& h_in, double tol) {
  const int p = static_cast<int>(G_in.cols());
  require(G_in.rows() == h_in.size(), "min_norm_point: shape mismatch");
  // Goldfarb-Idnani dual active-set method for H = I, constraints written as
  // n_r^T z >= b_r with unit normals n_r = -G_r / |G_r|.
  std::vector<int> keep;
  for (int r = 0; r < G_in.rows(); ++r) {
    const double nr = G_in.row(r).norm();
    if (nr > 0.0) keep.push_back(r);
    else if (h_in[r] < -tol) return {};  // 0 <= h fails: empty set
  }
  const int m = static_cast<int>(keep.size());
  Matrix Nt(m, p);
  Vector b(m);
  for (int r = 0; r < m; ++r) {
    const double nr = G_in.row(keep[r]).norm();
    Nt.row(r) = -G_in.row(keep[r]) / nr;
    b[r] = -h_in[keep[r]] / nr;
  }

  MinNormResult res;
  Vector z = Vector::Zero(p);
  std::vector<int> active;
  Vector u(0);  // multipliers of the active constraints
  std::vector<char> is_active(m, 0);
  const int max_it = 20 * (m + p) + 100;

  while (res.iterations < max_it) {
    // Most violated inactive constraint.
    int q = -1;
    double worst = -tol * std::max(1.0, z.cwiseAbs().maxCoeff());
    const Vector s = Nt * z - b;
    for (int r = 0; r < m; ++r) {
      if (!is_active[r] && s[r] < worst) {
        worst = s[r];
        q = r;
      }
    }
    if (q < 0) {
      res.converged = true;
      break;
    }
    double uq = 0.0;
    while (true) {
      ++res.iterations;
      if (res.iterations >= max_it) break;
      const int k = static_cast<int>(active.size());
      const Vector nq = Nt.row(q).transpose();
      Vector dir = nq;
      Vector r_dual(k);
      if (k > 0) {
        Matrix NA(p, k);
        for (int j = 0; j < k; ++j) NA.col(j) = Nt.row(active[j]).transpose();
        Eigen::ColPivHouseholderQR<Matrix> qr(NA);
        r_dual = qr.solve(nq);
        dir = nq - NA * r_dual;
      }
      // Partial step: largest move keeping the active multipliers >= 0.
      double t1 = kInf;
      int drop = -1;
      for (int j = 0; j < k; ++j) {
        if (r_dual[j] > 1e-14) {
          const double tj = u[j] / r_dual[j];
          if (tj < t1) {
            t1 = tj;
            drop = j;
          }
        }
      }
      // Full step: makes constraint q active.
      const double dn = dir.dot(nq);
      const double t2 = dn > 1e-14 ? -(nq.dot(z) - b[q]) / dn : kInf;
      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        res.z = z;
        return res;  // infeasible
      }
      const double t = std::min(t1, t2);
      if (std::isfinite(t2)) z += t * dir;
      if (k > 0) u -= t * r_dual;
      uq += t;
      if (t == t2) {
        active.push_back(q);
        is_active[q] = 1;
        u.conservativeResize(k + 1);
        u[k] = uq;
        break;
      }
      is_active[active[drop]] = 0;
      active.erase(active.begin() + drop);
      for (int j = drop; j + 1 < k; ++j) u[j] = u[j + 1];
      u.conservativeResize(k - 1);
    }
  }
  res.z = z;
  return res;
}

bool in_feasibility_set(const DataPoint& p, const GradientFamily& family,
                        double budget, const Vector& beta, double delta,
                        double rel_tol) {
  require(rel_tol >= 0.0, "in_feasibility_set: rel_tol must be >= 0");
  const Matrix F = family(p.x_star).evaluate(beta);
  const double scale = std::max(1.0, F.cwiseAbs().cwiseProduct(p.x_star.cwiseAbs()).sum());
  const GammaInterval g = feasible_gamma_interval(F, p.x_star, p.alpha, budget,
                                                  delta + rel_tol * scale);
  if (g.feasible) return true;
  if (!std::isfinite(g.lo)) return false;
  return g.lo <= g.hi + rel_tol * std::max({1.0, std::abs(g.lo), std::abs(g.hi)});
}

LearnResult learn_weights(const Dataset& dataset, const GradientFamily& family,
                          double budget, const LearnOptions& opts) {
  const LpProblem lp =
      build_inverse_lp(dataset, family, budget, opts.norm, opts.beta_lo, opts.beta_hi);
  const LpSolution sol = solve_lp(lp);
  switch (sol.status) {
    case LpStatus::kOptimal: break;
    case LpStatus::kInfeasible:
      throw ValidationError(
          "inverse LP is infeasible: data inconsistent with the gradient family");
    case LpStatus::kUnbounded:
      throw ValidationError("inverse LP is unbounded: supply finite beta bounds");
    case LpStatus::kNumericalError:
      throw NumericalError("inverse LP: simplex numerical breakdown");
  }

  const int N = static_cast<int>(dataset.points[0].x_star.rows());
  const int M = static_cast<int>(dataset.M());
  const int nd = opts.norm == SlackNorm::kInf ? 1 : M;

  LearnResult res;
  res.norm = opts.norm;
  res.beta_hat = sol.x.head(N);
  res.gamma = sol.x.segment(N, M);
  res.delta = sol.x.segment(N + M, nd);
  res.objective = sol.objective;
  res.optimal_face_dim_hint = sol.zero_reduced_cost_nonbasic;
  res.lp_iterations = sol.iterations;

  const bool want_tie_break =
      opts.tie_break == TieBreak::kAlways ||
      (opts.tie_break == TieBreak::kAuto && sol.zero_reduced_cost_nonbasic > 0);
  if (!want_tie_break) return res;

  // Optimal face with the slack pinned at its optimum (+1e-9 in total).
  // Under l1 each delta_k is pinned individually, a subset of that face.
  Vector delta_fixed = res.delta;
  delta_fixed.array() += 1e-9 / nd;
  const int p = N + M;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (int r = 0; r < lp.num_rows(); ++r) {
    Eigen::RowVectorXd g = lp.A.row(r).head(p);
    double h = lp.rhs[r] - lp.A.row(r).segment(p, nd).dot(delta_fixed);
    if (lp.senses[r] == RowSense::kGreaterEqual) {
      g = -g;
      h = -h;
    }
    rows.push_back(g);
    rhs.push_back(h);
  }
  for (int j = 0; j < p; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(p);
    e[j] = 1.0;
    if (j < N) {
      rows.push_back(e);
      rhs.push_back(opts.beta_hi);
      rows.push_back(-e);
      rhs.push_back(-opts.beta_lo);
    } else {
      rows.push_back(e);
      rhs.push_back(0.0);
    }
  }
  Matrix G(static_cast<int>(rows.size()), p);
  Vector h(static_cast<int>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    G.row(r) = rows[r];
    h[r] = rhs[r];
  }
  const MinNormResult mn = min_norm_point(G, h);
  // A numerically empty face keeps the LP vertex.
  if (!mn.converged) return res;

  res.beta_hat = mn.z.head(N);
  res.gamma = mn.z.tail(M).cwiseMin(0.0);
  // The selected point is certified against the pinned slack; keep it unless
  // the point needs more.
  for (int k = 0; k < M; ++k) {
    const DataPoint& pt = dataset.points[k];
    const Matrix F = family(pt.x_star).evaluate(res.beta_hat);
    const GammaInterval iv = feasible_gamma_interval(F, pt.x_star, pt.alpha, budget, 0.0);
    res.gamma[k] = std::min(res.gamma[k], iv.hi);
    const double need =
        std::max(0.0, F.cwiseProduct(pt.x_star).sum() - res.gamma[k] * budget);
    const int slot = nd == 1 ? 0 : k;
    res.delta[slot] = std::max(delta_fixed[slot], std::max(res.delta[slot], need));
  }
  res.objective = res.delta.sum();
  res.tie_break_applied = true;
  return res;
}

double mee(const Vector& beta_hat, const Vector& beta_true) {
  require(beta_hat.size() == beta_true.size() && beta_hat.size() > 0,
          "mee: length mismatch");
  return (beta_hat - beta_true).norm() / static_cast<double>(beta_hat.size());
}

}  // namespace aggrobust
