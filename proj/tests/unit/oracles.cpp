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

#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

using aggrobust::LpProblem;
using aggrobust::RowSense;
using aggrobust::kInf;

aggrobust::GameConfig demand_response_game() {
  aggrobust::GameConfig c;
  c.players = 4;
  c.dim = 1;
  c.budget = 75.0;
  c.payoff.l = Vector::Ones(4);
  c.payoff.h = (Vector(4) << 50, 55, 60, 65).finished();
  c.payoff.q = 0.04;
  c.payoff.p0 = 5.0;
  c.beta_true = (Vector(4) << 0.1, 0.2, 0.3, 0.4).finished();
  return c;
}

aggrobust::UncertaintyProfile demand_response_box() {
  return aggrobust::uniform_box_profile(4, Vector::Constant(1, 0.1), Vector::Constant(1, 2.0));
}

Vector hand_gradient(const aggrobust::QuadraticPayoffParams& p, const Vector& beta,
                     const Vector& x) {
  const int N = static_cast<int>(x.size());
  Vector F(N);
  for (int i = 0; i < N; ++i) {
    double others = 0.0;
    for (int j = 0; j < N; ++j)
      if (j != i) others += beta[j] * x[j];
    F[i] = 2.0 * p.l[i] * (x[i] - p.h[i]) + 2.0 * p.q * N * beta[i] * x[i] +
           p.q * N * others + p.p0;
  }
  return F;
}

KktPoint active_set_vgne(const aggrobust::QuadraticPayoffParams& p, const Vector& beta,
                         double budget, const Vector& alpha) {
  const int N = static_cast<int>(alpha.size());
  // F(x) = J x + f0 with J read off the hand gradient.
  const Vector f0 = hand_gradient(p, beta, Vector::Zero(N));
  Matrix J(N, N);
  for (int j = 0; j < N; ++j) J.col(j) = hand_gradient(p, beta, Vector::Unit(N, j)) - f0;

  for (int mask = 0; mask < (1 << N); ++mask) {
    for (int tight = 0; tight < 2; ++tight) {
      std::vector<int> free_idx;
      for (int i = 0; i < N; ++i)
        if (!(mask >> i & 1)) free_idx.push_back(i);
      const int nf = static_cast<int>(free_idx.size());
      const int dim = nf + tight;
      if (dim == 0) continue;
      Matrix A = Matrix::Zero(dim, dim);
      Vector rhs = Vector::Zero(dim);
      for (int r = 0; r < nf; ++r) {
        const int i = free_idx[r];
        for (int c = 0; c < nf; ++c) A(r, c) = J(i, free_idx[c]);
        if (tight) A(r, nf) = alpha[i];
        rhs[r] = -f0[i];
      }
      if (tight) {
        for (int c = 0; c < nf; ++c) A(nf, c) = alpha[free_idx[c]];
        rhs[nf] = budget;
      }
      Eigen::FullPivLU<Matrix> lu(A);
      if (!lu.isInvertible()) continue;
      const Vector sol = lu.solve(rhs);
      Vector x = Vector::Zero(N);
      for (int r = 0; r < nf; ++r) x[free_idx[r]] = sol[r];
      const double lambda = tight ? sol[nf] : 0.0;
      bool ok = lambda >= -1e-12 && (x.array() >= -1e-12).all() &&
                alpha.dot(x) <= budget + 1e-9;
      const Vector F = J * x + f0;
      for (int i = 0; i < N && ok; ++i)
        if (mask >> i & 1) ok = F[i] + lambda * alpha[i] >= -1e-9;
      if (ok) return KktPoint{true, x.cwiseMax(0.0), std::max(lambda, 0.0)};
    }
  }
  // Budget slack and every player interior at x = 0 cannot both fail unless
  // the origin itself is the answer.
  return KktPoint{};
}

Vector feasible_probe(const Vector& alpha, double budget, std::mt19937_64& rng) {
  const int N = static_cast<int>(alpha.size());
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector w(N + 1);
  for (int i = 0; i <= N; ++i) w[i] = ex(rng);
  const double mode = u(rng);
  if (mode < 0.25) w[N] = 0.0;  // on the budget face
  if (mode > 0.75)
    for (int i = 0; i < N; ++i)
      if (u(rng) < 0.5) w[i] = 0.0;  // on coordinate faces
  const double total = w.sum();
  if (total == 0.0) return Vector::Zero(N);
  Vector x(N);
  // Shrink slightly so rounding never leaves the set.
  for (int i = 0; i < N; ++i) x[i] = (1.0 - 1e-12) * budget * (w[i] / total) / alpha[i];
  return x;
}

namespace {

struct Rows {
  Matrix G;
  Vector h;
  std::vector<bool> eq;
};

// Calls fn(v) for every vertex of {G x <= h (eq rows: ==)}.
template <typename Fn>
void for_each_vertex(const Rows& r, int n, double tol, Fn&& fn) {
  const int m = static_cast<int>(r.G.rows());
  if (m < n) return;
  std::vector<int> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Matrix A(n, n);
    Vector b(n);
    for (int i = 0; i < n; ++i) {
      A.row(i) = r.G.row(pick[i]);
      b[i] = r.h[pick[i]];
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.isInvertible()) {
      const Vector v = lu.solve(b);
      bool ok = v.allFinite();
      for (int k = 0; k < m && ok; ++k) {
        const double lhs = r.G.row(k).dot(v);
        const double scale = 1.0 + std::abs(r.h[k]) + (r.G.row(k).cwiseAbs() * v.cwiseAbs())(0);
        ok = r.eq[k] ? std::abs(lhs - r.h[k]) <= tol * scale : lhs <= r.h[k] + tol * scale;
      }
      if (ok) fn(v);
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == m - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
}

void push(Rows& r, const Eigen::RowVectorXd& g, double h, bool eq) {
  const int k = static_cast<int>(r.G.rows());
  r.G.conservativeResize(k + 1, g.size());
  r.G.row(k) = g;
  r.h.conservativeResize(k + 1);
  r.h[k] = h;
  r.eq.push_back(eq);
}

}  // namespace

LpOracleResult brute_force_lp(const LpProblem& p) {
  const int n = p.num_vars();
  // Free columns are split into two nonnegative parts so that the primal set
  // is pointed; the recession cone is examined in the original space.
  std::vector<int> split;
  for (int j = 0; j < n; ++j)
    if (!std::isfinite(p.lower[j]) && !std::isfinite(p.upper[j])) split.push_back(j);
  const int ns = n + static_cast<int>(split.size());
  Matrix map = Matrix::Zero(n, ns);
  map.leftCols(n).setIdentity();
  for (std::size_t s = 0; s < split.size(); ++s) map(split[s], n + static_cast<int>(s)) = -1.0;

  Rows primal, cone;
  primal.G.resize(0, ns);
  cone.G.resize(0, n);
  for (int r = 0; r < p.num_rows(); ++r) {
    Eigen::RowVectorXd g = p.A.row(r);
    double h = p.rhs[r];
    const bool eq = p.senses[r] == RowSense::kEqual;
    if (p.senses[r] == RowSense::kGreaterEqual) {
      g = -g;
      h = -h;
    }
    push(primal, g * map, h, eq);
    push(cone, g, 0.0, eq);
  }
  for (int j = 0; j < n; ++j) {
    const Eigen::RowVectorXd e = Eigen::RowVectorXd::Unit(n, j);
    const Eigen::RowVectorXd es = Eigen::RowVectorXd::Unit(ns, j);
    const bool lo = std::isfinite(p.lower[j]), hi = std::isfinite(p.upper[j]);
    if (lo) {
      push(primal, -es, -p.lower[j], false);
      push(cone, -e, 0.0, false);
    }
    if (hi) {
      push(primal, es, p.upper[j], false);
      push(cone, e, 0.0, false);
    }
    if (!hi) push(cone, e, 1.0, false);
    if (!lo) push(cone, -e, 1.0, false);
  }
  for (std::size_t s = 0; s < split.size(); ++s) {
    push(primal, -Eigen::RowVectorXd::Unit(ns, split[s]), 0.0, false);
    push(primal, -Eigen::RowVectorXd::Unit(ns, n + static_cast<int>(s)), 0.0, false);
  }

  LpOracleResult res;
  const Vector cs = map.transpose() * p.c;
  double best = std::numeric_limits<double>::infinity();
  for_each_vertex(primal, ns, 1e-9, [&](const Vector& v) { best = std::min(best, cs.dot(v)); });
  if (!std::isfinite(best)) {
    res.verdict = LpVerdict::kInfeasible;
    return res;
  }
  double ray = 0.0;
  for_each_vertex(cone, n, 1e-9, [&](const Vector& d) { ray = std::min(ray, p.c.dot(d)); });
  if (ray < -1e-9) {
    res.verdict = LpVerdict::kUnbounded;
    return res;
  }
  res.verdict = LpVerdict::kOptimal;
  res.objective = best;
  return res;
}

LpProblem random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv(1, 6), nr(1, 8), coef(-5, 5), pick(0, 9);
  LpProblem p;
  const int n = nv(rng), m = nr(rng);
  // Most right-hand sides are placed so that an integer anchor point is
  // feasible; the rest are arbitrary and often make the problem infeasible.
  Vector anchor(n);
  for (int j = 0; j < n; ++j) {
    const int kind = pick(rng);
    double lo = 0.0, hi = kInf;
    if (kind == 0) lo = -kInf;
    else if (kind == 1) lo = coef(rng);
    else if (kind == 2) {
      lo = -std::abs(coef(rng));
      hi = lo + 1 + std::abs(coef(rng));
    } else if (kind == 3) {
      lo = -kInf;
      hi = coef(rng);
    }
    anchor[j] = std::isfinite(lo) ? lo + (std::isfinite(hi) ? 0.0 : 1.0) : hi - 1.0;
    if (!std::isfinite(lo) && !std::isfinite(hi)) anchor[j] = coef(rng);
    p.add_variable("v" + std::to_string(j), lo, hi, coef(rng));
  }
  for (int r = 0; r < m; ++r) {
    std::vector<std::pair<int, double>> row;
    double at_anchor = 0.0;
    for (int j = 0; j < n; ++j)
      if (pick(rng) < 7) {
        const double a = coef(rng);
        row.emplace_back(j, a);
        at_anchor += a * anchor[j];
      }
    const int s = pick(rng);
    const RowSense sense = s < 6 ? RowSense::kLessEqual : s < 9 ? RowSense::kGreaterEqual
                                                                : RowSense::kEqual;
    double rhs = coef(rng) * 2.0;
    if (pick(rng) < 7) {
      const double slack = sense == RowSense::kEqual ? 0.0 : std::abs(coef(rng));
      rhs = sense == RowSense::kGreaterEqual ? at_anchor - slack : at_anchor + slack;
    }
    p.add_row(row, sense, rhs);
  }
  return p;
}

std::vector<Vector> polyhedron_vertices(const Matrix& D, const Vector& d, double tol) {
  Rows r;
  r.G = D;
  r.h = d;
  r.eq.assign(D.rows(), false);
  std::vector<Vector> out;
  for_each_vertex(r, static_cast<int>(D.cols()), tol, [&](const Vector& v) { out.push_back(v); });
  return out;
}

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_rational exact_tail(long M, int N, long eps_num, long eps_den) {
  const cpp_rational eps(eps_num, eps_den);
  const cpp_rational one_minus = 1 - eps;
  cpp_rational sum = 0;
  cpp_int binom = 1;
  for (long l = 0; l <= std::min<long>(N, M); ++l) {
    if (l > 0) binom = binom * (M - l + 1) / l;
    cpp_rational term = cpp_rational(binom);
    for (long k = 0; k < l; ++k) term *= eps;
    for (long k = 0; k < M - l; ++k) term *= one_minus;
    sum += term;
  }
  return sum;
}

}  // namespace

double exact_binomial_tail(long M, int N, long eps_num, long eps_den) {
  return exact_tail(M, N, eps_num, eps_den).convert_to<double>();
}

std::string exact_binomial_tail_rounded(long M, int N, long eps_num, long eps_den, int digits) {
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const cpp_rational v = exact_tail(M, N, eps_num, eps_den) * scale + cpp_rational(1, 2);
  const cpp_int q = boost::multiprecision::numerator(v) / boost::multiprecision::denominator(v);
  std::string s = q.str();
  while (static_cast<int>(s.size()) <= digits) s = "0" + s;
  return s.substr(0, s.size() - digits) + "." + s.substr(s.size() - digits);
}

double min_feasible_delta(const aggrobust::Dataset& ds, const aggrobust::QuadraticPayoffParams& p,
                          double budget, const Vector& beta) {
  double worst = 0.0;
  for (const auto& pt : ds.points) {
    const Vector x = pt.x_star.col(0), a = pt.alpha.col(0);
    const Vector F = hand_gradient(p, beta, x);
    double hi = 0.0, lo = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < F.size(); ++i) {
      if (a[i] > 0) hi = std::min(hi, F[i] / a[i]);
      else if (a[i] < 0) lo = std::max(lo, F[i] / a[i]);
      else if (F[i] < 0) return std::numeric_limits<double>::infinity();
    }
    if (lo > hi) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, F.dot(x) - budget * hi);
  }
  return worst;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(ra.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
