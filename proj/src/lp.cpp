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

#include "aggrobust/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aggrobust {

int LpProblem::add_variable(const std::string& name, double lo, double hi,
                            double cost) {
  const int j = num_vars();
  c.conservativeResize(j + 1);
  c[j] = cost;
  lower.conservativeResize(j + 1);
  lower[j] = lo;
  upper.conservativeResize(j + 1);
  upper[j] = hi;
  A.conservativeResize(num_rows(), j + 1);
  A.col(j).setZero();
  names.push_back(name);
  return j;
}

int LpProblem::add_row(const std::vector<std::pair<int, double>>& coeffs,
                       RowSense sense, double rhs_value) {
  const int r = num_rows();
  A.conservativeResize(r + 1, num_vars());
  A.row(r).setZero();
  for (const auto& [col, v] : coeffs) {
    require(col >= 0 && col < num_vars(), "add_row: column out of range");
    A(r, col) += v;
  }
  rhs.conservativeResize(r + 1);
  rhs[r] = rhs_value;
  senses.push_back(sense);
  return r;
}

int LpProblem::column(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<int>(j);
  return -1;
}

void LpProblem::validate() const {
  const int n = num_vars();
  const int m = num_rows();
  require(A.rows() == m && A.cols() == n, "LP: constraint matrix shape");
  require(static_cast<int>(senses.size()) == m, "LP: one sense per row");
  require(lower.size() == n && upper.size() == n, "LP: one bound pair per column");
  require(names.empty() || static_cast<int>(names.size()) == n,
          "LP: one name per column");
  require(c.allFinite() && A.allFinite() && rhs.allFinite(),
          "LP: data must be finite");
  for (int j = 0; j < n; ++j) {
    require(!std::isnan(lower[j]) && !std::isnan(upper[j]), "LP: NaN bound");
    require(lower[j] <= upper[j], "LP: lower bound above upper bound");
    require(lower[j] < kInf && upper[j] > -kInf, "LP: empty bound range");
  }
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kNumericalError: return "numerical_error";
  }
  return "unknown";
}

double primal_infeasibility(const LpProblem& p, const Vector& x) {
  double worst = 0.0;
  const Vector ax = p.A * x;
  for (int r = 0; r < p.num_rows(); ++r) {
    const double diff = ax[r] - p.rhs[r];
    switch (p.senses[r]) {
      case RowSense::kLessEqual: worst = std::max(worst, diff); break;
      case RowSense::kGreaterEqual: worst = std::max(worst, -diff); break;
      case RowSense::kEqual: worst = std::max(worst, std::abs(diff)); break;
    }
  }
  for (int j = 0; j < p.num_vars(); ++j) {
    worst = std::max(worst, p.lower[j] - x[j]);
    worst = std::max(worst, x[j] - p.upper[j]);
  }
  return worst;
}

namespace {

// x_j = offset + sign * x'[pos] - x'[neg]   (neg only for free columns)
struct ColumnMap {
  int pos = -1;
  int neg = -1;
  double offset = 0.0;
  double sign = 1.0;
};

struct StdRow {
  Vector coef;          // over structural standard columns
  double rhs = 0.0;
  RowSense sense = RowSense::kEqual;
  int origin = -1;      // original row, or -1 for a bound row
  double scale = 1.0;   // original = scale * standard (before flip)
  double flip = 1.0;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tableau {
 public:
  Tableau(int rows, int cols) : T_(RowMatrix::Zero(rows + 1, cols + 1)), m_(rows), n_(cols) {}

  /// Snapshot of the constraint rows and the starting basis.
  void freeze(const std::vector<int>& basis) {
    T0_ = T_.topRows(m_);
    good_basis_ = basis;
  }

  /// Recomputes B^{-1} [A | b] from the frozen data. Returns false, leaving
  /// the tableau untouched, when the basis matrix is numerically singular.
  bool reinvert(const std::vector<int>& basis) {
    if (m_ == 0) {
      set_objective(costs_, basis);
      good_basis_ = basis;
      return true;
    }
    Matrix B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = T0_.col(basis[i]);
    Eigen::FullPivLU<Matrix> lu(B);
    lu.setThreshold(1e-11);
    if (!lu.isInvertible()) return false;
    RowMatrix fresh = lu.solve(T0_);
    if (!fresh.allFinite()) return false;
    T_.topRows(m_) = fresh;
    for (int i = 0; i < m_; ++i) T_(i, basis[i]) = 1.0;
    set_objective(costs_, basis);
    good_basis_ = basis;
    return true;
  }

  /// The last basis that passed a reinversion.
  const std::vector<int>& good_basis() const { return good_basis_; }

  double& at(int i, int j) { return T_(i, j); }
  double at(int i, int j) const { return T_(i, j); }
  double& rhs(int i) { return T_(i, n_); }
  double cost(int j) const { return T_(m_, j); }
  double objective() const { return -T_(m_, n_); }
  int rows() const { return m_; }
  int cols() const { return n_; }

  void pivot(int p, int q) {
    T_.row(p) /= T_(p, q);
    T_(p, q) = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == p) continue;
      const double f = T_(i, q);
      if (f != 0.0) {
        T_.row(i) -= f * T_.row(p);
        T_(i, q) = 0.0;
      }
    }
  }

  void set_objective(const Vector& costs, const std::vector<int>& basis) {
    costs_ = costs;
    T_.row(m_).setZero();
    T_.row(m_).head(n_) = costs.transpose();
    for (int i = 0; i < m_; ++i) {
      const double cb = costs[basis[i]];
      if (cb != 0.0) T_.row(m_) -= cb * T_.row(i);
    }
  }

 private:
  RowMatrix T_;
  Matrix T0_;
  Vector costs_;
  std::vector<int> good_basis_;
  int m_;
  int n_;
};

enum class PhaseResult { kOptimal, kUnbounded, kStalled, kSingular };

PhaseResult run_phase(Tableau& tab, std::vector<int>& basis,
                      const std::vector<bool>& allowed,
                      const SimplexOptions& opts, bool cautious,
                      long max_pivots, long& pivots) {
  constexpr double kFeasTol = 1e-9;
  const double pivot_floor = cautious ? std::max(opts.pivot_tol, 1e-7) : opts.pivot_tol;
  int degenerate_streak = 0;
  const long reinvert_every =
      opts.reinvert_every > 0 ? opts.reinvert_every : tab.rows() + 100L;
  long since_reinvert = 0;
  while (true) {
    if (pivots >= max_pivots) return PhaseResult::kStalled;
    const bool bland = cautious || opts.pricing == PricingRule::kBland ||
                       degenerate_streak > opts.degenerate_streak_limit;
    int q = -1;
    double best = -opts.optimality_tol;
    for (int j = 0; j < tab.cols(); ++j) {
      if (!allowed[j]) continue;
      const double d = tab.cost(j);
      if (d < best) {
        q = j;
        if (bland) break;
        best = d;
      }
    }
    if (q < 0) return PhaseResult::kOptimal;

    double col_max = 0.0;
    for (int i = 0; i < tab.rows(); ++i) col_max = std::max(col_max, std::abs(tab.at(i, q)));
    const double tol = std::max(pivot_floor, 1e-9 * col_max);

    int p = -1;
    double ratio = kInf;
    // Leftover artificials sit at zero and leave first, whatever the sign.
    for (int i = 0; i < tab.rows() && p < 0; ++i)
      if (!allowed[basis[i]] && std::abs(tab.at(i, q)) > tol) {
        p = i;
        ratio = 0.0;
      }
    if (p < 0) {
      // Harris two-pass test: bound the step with a small feasibility
      // tolerance, then take the largest pivot (or Bland's row) within it.
      double bound = kInf;
      for (int i = 0; i < tab.rows(); ++i) {
        const double a = tab.at(i, q);
        if (a > tol)
          bound = std::min(bound, (std::max(tab.rhs(i), 0.0) + kFeasTol) / a);
      }
      for (int i = 0; i < tab.rows(); ++i) {
        const double a = tab.at(i, q);
        if (a <= tol) continue;
        const double r = std::max(tab.rhs(i), 0.0) / a;
        if (r > bound) continue;
        if (p < 0 || (bland ? basis[i] < basis[p] : a > tab.at(p, q))) {
          p = i;
          ratio = r;
        }
      }
    }
    if (p < 0) return PhaseResult::kUnbounded;
    degenerate_streak = ratio <= 1e-12 ? degenerate_streak + 1 : 0;
    tab.pivot(p, q);
    basis[p] = q;
    ++pivots;
    if (++since_reinvert >= reinvert_every) {
      if (!tab.reinvert(basis)) return PhaseResult::kSingular;
      since_reinvert = 0;
    }
  }
}

// Runs a phase and confirms its verdict on a tableau rebuilt from the data.
// A basis that turns out singular is rolled back to the last verified one and
// the phase resumes with Bland's rule and a stricter pivot tolerance.
PhaseResult run_phase_refreshed(Tableau& tab, std::vector<int>& basis,
                                const std::vector<bool>& allowed,
                                const SimplexOptions& opts, long max_pivots,
                                long& pivots) {
  bool cautious = false;
  for (int round = 0; round < 8; ++round) {
    PhaseResult r = run_phase(tab, basis, allowed, opts, cautious, max_pivots, pivots);
    if (r == PhaseResult::kStalled) return r;
    if (r != PhaseResult::kSingular && tab.reinvert(basis)) {
      const long settled = pivots;
      const PhaseResult again =
          run_phase(tab, basis, allowed, opts, cautious, max_pivots, pivots);
      if (again == r && pivots == settled) return r;
      if (again == PhaseResult::kStalled) return again;
      if (again != PhaseResult::kSingular) continue;
    }
    basis = tab.good_basis();
    if (!tab.reinvert(basis)) return PhaseResult::kStalled;
    cautious = true;
  }
  return PhaseResult::kStalled;
}

}  // namespace

LpSolution solve_lp(const LpProblem& prob, const SimplexOptions& opts) {
  prob.validate();
  const int n = prob.num_vars();
  LpSolution sol;

  // Column substitution.
  std::vector<ColumnMap> cmap(n);
  int ns = 0;
  std::vector<StdRow> rows;
  std::vector<std::pair<int, double>> bound_rows;  // (std column, ub)
  for (int j = 0; j < n; ++j) {
    const double lo = prob.lower[j], hi = prob.upper[j];
    ColumnMap& cm = cmap[j];
    if (std::isfinite(lo)) {
      cm.offset = lo;
      cm.pos = ns++;
      if (std::isfinite(hi)) bound_rows.emplace_back(cm.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      cm.offset = hi;
      cm.sign = -1.0;
      cm.pos = ns++;
    } else {
      cm.pos = ns++;
      cm.neg = ns++;
    }
  }
  Vector std_cost = Vector::Zero(ns);
  for (int j = 0; j < n; ++j) {
    std_cost[cmap[j].pos] += prob.c[j] * cmap[j].sign;
    if (cmap[j].neg >= 0) std_cost[cmap[j].neg] -= prob.c[j];
  }

  for (int r = 0; r < prob.num_rows(); ++r) {
    StdRow row;
    row.coef = Vector::Zero(ns);
    row.rhs = prob.rhs[r];
    row.sense = prob.senses[r];
    row.origin = r;
    for (int j = 0; j < n; ++j) {
      const double a = prob.A(r, j);
      if (a == 0.0) continue;
      row.coef[cmap[j].pos] += a * cmap[j].sign;
      if (cmap[j].neg >= 0) row.coef[cmap[j].neg] -= a;
      row.rhs -= a * cmap[j].offset;
    }
    rows.push_back(std::move(row));
  }
  for (const auto& [col, ub] : bound_rows) {
    StdRow row;
    row.coef = Vector::Zero(ns);
    row.coef[col] = 1.0;
    row.rhs = ub;
    row.sense = RowSense::kLessEqual;
    rows.push_back(std::move(row));
  }

  // Equilibrate rows; constant rows are checked and dropped.
  std::vector<StdRow> kept;
  for (auto& row : rows) {
    const double s = row.coef.size() ? row.coef.cwiseAbs().maxCoeff() : 0.0;
    if (s == 0.0) {
      const double tol = 1e-9 * std::max(1.0, std::abs(row.rhs));
      const bool ok = (row.sense == RowSense::kLessEqual && 0.0 <= row.rhs + tol) ||
                      (row.sense == RowSense::kGreaterEqual && 0.0 >= row.rhs - tol) ||
                      (row.sense == RowSense::kEqual && std::abs(row.rhs) <= tol);
      if (!ok) {
        sol.status = LpStatus::kInfeasible;
        return sol;
      }
      continue;
    }
    row.scale = s;
    row.coef /= s;
    row.rhs /= s;
    kept.push_back(std::move(row));
  }
  rows = std::move(kept);
  const int m = static_cast<int>(rows.size());

  // Layout: [structural | slacks | artificials].
  std::vector<int> slack_col(m, -1);
  int next = ns;
  for (int i = 0; i < m; ++i)
    if (rows[i].sense != RowSense::kEqual) slack_col[i] = next++;
  const int first_art = next;
  std::vector<int> art_col(m, -1);
  std::vector<int> init_col(m, -1);
  for (int i = 0; i < m; ++i) {
    double slack_sign = rows[i].sense == RowSense::kLessEqual ? 1.0 : -1.0;
    if (rows[i].rhs < 0.0) {
      rows[i].flip = -1.0;
      slack_sign = -slack_sign;
    }
    if (slack_col[i] >= 0 && slack_sign > 0.0 && rows[i].sense != RowSense::kEqual) {
      init_col[i] = slack_col[i];
    } else {
      art_col[i] = next++;
      init_col[i] = art_col[i];
    }
  }
  const int total = next;

  Tableau tab(m, total);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    const StdRow& row = rows[i];
    for (int j = 0; j < ns; ++j) tab.at(i, j) = row.flip * row.coef[j];
    if (slack_col[i] >= 0)
      tab.at(i, slack_col[i]) =
          row.flip * (row.sense == RowSense::kLessEqual ? 1.0 : -1.0);
    if (art_col[i] >= 0) tab.at(i, art_col[i]) = 1.0;
    tab.rhs(i) = row.flip * row.rhs;
    basis[i] = init_col[i];
  }
  tab.freeze(basis);

  const long max_pivots =
      opts.max_pivots > 0 ? opts.max_pivots : 200L * (m + total) + 1000;
  long pivots = 0;

  // Phase 1: minimise the sum of artificials.
  if (total > first_art) {
    Vector c1 = Vector::Zero(total);
    for (int j = first_art; j < total; ++j) c1[j] = 1.0;
    tab.set_objective(c1, basis);
    std::vector<bool> allowed(total, true);
    const PhaseResult r1 =
        run_phase_refreshed(tab, basis, allowed, opts, max_pivots, pivots);
    if (r1 != PhaseResult::kOptimal) {
      sol.status = LpStatus::kNumericalError;
      sol.iterations = pivots;
      return sol;
    }
    double rhs_scale = 1.0;
    for (int i = 0; i < m; ++i) rhs_scale = std::max(rhs_scale, std::abs(rows[i].rhs));
    if (tab.objective() > 1e-9 * rhs_scale) {
      sol.status = LpStatus::kInfeasible;
      sol.iterations = pivots;
      return sol;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < first_art) continue;
      int q = -1;
      double best = 1e-9;
      for (int j = 0; j < first_art; ++j) {
        if (std::abs(tab.at(i, j)) > best) {
          best = std::abs(tab.at(i, j));
          q = j;
        }
      }
      if (q >= 0) {
        tab.pivot(i, q);
        basis[i] = q;
        ++pivots;
      }
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  // Phase 2.
  Vector c2 = Vector::Zero(total);
  c2.head(ns) = std_cost;
  tab.set_objective(c2, basis);
  std::vector<bool> allowed(total, true);
  for (int j = first_art; j < total; ++j) allowed[j] = false;
  const PhaseResult r2 =
      run_phase_refreshed(tab, basis, allowed, opts, max_pivots, pivots);
  sol.iterations = pivots;
  if (r2 == PhaseResult::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  if (r2 == PhaseResult::kStalled) {
    sol.status = LpStatus::kNumericalError;
    return sol;
  }

  Vector xs = Vector::Zero(total);
  for (int i = 0; i < m; ++i) xs[basis[i]] = std::max(0.0, tab.rhs(i));
  sol.x.resize(n);
  for (int j = 0; j < n; ++j) {
    double v = cmap[j].offset + cmap[j].sign * xs[cmap[j].pos];
    if (cmap[j].neg >= 0) v -= xs[cmap[j].neg];
    sol.x[j] = std::clamp(v, prob.lower[j], prob.upper[j]);
  }
  sol.objective = prob.c.dot(sol.x);

  // Row duals from B^{-1}, read off the columns that started as the identity.
  sol.duals = Vector::Zero(prob.num_rows());
  for (int i = 0; i < m; ++i) {
    if (rows[i].origin < 0) continue;
    double y = 0.0;
    for (int k = 0; k < m; ++k) y += c2[basis[k]] * tab.at(k, init_col[i]);
    sol.duals[rows[i].origin] = y * rows[i].flip / rows[i].scale;
  }
  sol.reduced_costs = prob.c - prob.A.transpose() * sol.duals;
  sol.dual_objective = prob.rhs.dot(sol.duals);
  const double ztol = 1e-9 * std::max(1.0, prob.c.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j) {
    const double d = sol.reduced_costs[j];
    if (d > ztol && std::isfinite(prob.lower[j])) sol.dual_objective += d * prob.lower[j];
    else if (d < -ztol && std::isfinite(prob.upper[j])) sol.dual_objective += d * prob.upper[j];
  }

  std::vector<bool> is_basic(total, false);
  for (int b : basis) is_basic[b] = true;
  for (int j = 0; j < first_art; ++j) {
    if (is_basic[j] || std::abs(tab.cost(j)) > 1e-9) continue;
    // The mirror half of a split free column carries no extra freedom.
    bool mirror = false;
    for (const ColumnMap& cm : cmap)
      if (cm.neg >= 0 && ((j == cm.neg && is_basic[cm.pos]) ||
                          (j == cm.pos && is_basic[cm.neg])))
        mirror = true;
    if (!mirror) ++sol.zero_reduced_cost_nonbasic;
  }

  // Certify against the original data.
  const Vector ax = prob.A * sol.x;
  for (int r = 0; r < prob.num_rows(); ++r) {
    const double scale = std::max(
        {1.0, std::abs(prob.rhs[r]),
         (prob.A.row(r).cwiseAbs() * sol.x.cwiseAbs())(0)});
    double viol = ax[r] - prob.rhs[r];
    if (prob.senses[r] == RowSense::kGreaterEqual) viol = -viol;
    if (prob.senses[r] == RowSense::kEqual) viol = std::abs(viol);
    if (viol > 1e-9 * scale) {
      sol.status = LpStatus::kNumericalError;
      return sol;
    }
  }
  sol.status = LpStatus::kOptimal;
  return sol;
}

}  // namespace aggrobust
