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

#include "aggrobust/uncertainty.hpp"

#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "aggrobust/lp.hpp"
#include "aggrobust/numfmt.hpp"

namespace aggrobust {

Polyhedron::Polyhedron(Matrix D, Vector d) : D_(std::move(D)), d_(std::move(d)) {
  require(D_.rows() == d_.size(), "polyhedron: D and d row counts differ");
  require(D_.cols() >= 1, "polyhedron: dimension must be >= 1");
  require(D_.allFinite() && d_.allFinite(), "polyhedron: data must be finite");
  for (int r = 0; r < D_.rows(); ++r)
    require(std::abs(D_.row(r).norm() - 1.0) <= 1e-9,
            "polyhedron: row " + std::to_string(r) + " of D is not unit-norm");
  require(slater_check(D_, d_).feasible, "polyhedron: set is empty");
}

Polyhedron Polyhedron::normalized(Matrix D, Vector d) {
  require(D.rows() == d.size(), "polyhedron: D and d row counts differ");
  for (int r = 0; r < D.rows(); ++r) {
    const double nr = D.row(r).norm();
    require(nr > 0.0, "polyhedron: zero row in D");
    D.row(r) /= nr;
    d[r] /= nr;
  }
  return Polyhedron(std::move(D), std::move(d));
}

bool Polyhedron::contains(const Vector& alpha, double tol) const {
  if (alpha.size() != D_.cols()) return false;
  return ((D_ * alpha - d_).array() <= tol).all();
}

std::optional<std::pair<Vector, Vector>> Polyhedron::as_box() const {
  const int n = dim();
  Vector lo = Vector::Constant(n, -kInf), hi = Vector::Constant(n, kInf);
  for (int r = 0; r < rows(); ++r) {
    int nz = -1;
    for (int c = 0; c < n; ++c) {
      if (D_(r, c) == 0.0) continue;
      if (nz >= 0) return std::nullopt;
      nz = c;
    }
    if (nz < 0 || std::abs(std::abs(D_(r, nz)) - 1.0) > 1e-12) return std::nullopt;
    if (D_(r, nz) > 0) hi[nz] = std::min(hi[nz], d_[r]);
    else lo[nz] = std::max(lo[nz], -d_[r]);
  }
  if (!lo.allFinite() || !hi.allFinite()) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::optional<std::pair<Vector, Vector>> Polyhedron::bounding_box() const {
  if (auto box = as_box()) return box;
  const int n = dim();
  Vector lo(n), hi(n);
  for (int c = 0; c < n; ++c) {
    for (double dir : {1.0, -1.0}) {
      LpProblem lp;
      for (int k = 0; k < n; ++k)
        lp.add_variable("a" + std::to_string(k), -kInf, kInf, k == c ? dir : 0.0);
      for (int r = 0; r < rows(); ++r) {
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < n; ++k) row.emplace_back(k, D_(r, k));
        lp.add_row(row, RowSense::kLessEqual, d_[r]);
      }
      const LpSolution s = solve_lp(lp);
      if (s.status == LpStatus::kUnbounded) return std::nullopt;
      if (s.status != LpStatus::kOptimal)
        throw NumericalError("bounding_box: LP failed");
      (dir > 0 ? lo : hi)[c] = s.x[c];
    }
  }
  return std::make_pair(lo, hi);
}

Polyhedron box_polyhedron(const Vector& lo, const Vector& hi) {
  require(lo.size() == hi.size() && lo.size() >= 1, "box: lo/hi size mismatch");
  require(lo.allFinite() && hi.allFinite(), "box: bounds must be finite");
  require((lo.array() <= hi.array()).all(), "box: lo > hi");
  const int n = static_cast<int>(lo.size());
  Matrix D = Matrix::Zero(2 * n, n);
  Vector d(2 * n);
  for (int c = 0; c < n; ++c) {
    D(2 * c, c) = 1.0;
    d[2 * c] = hi[c];
    D(2 * c + 1, c) = -1.0;
    d[2 * c + 1] = -lo[c];
  }
  return Polyhedron(std::move(D), std::move(d));
}

SlaterReport slater_check(const Matrix& D, const Vector& d) {
  // max t  s.t.  D a + t 1 <= d,  t <= 1
  const int n = static_cast<int>(D.cols());
  LpProblem lp;
  for (int k = 0; k < n; ++k) lp.add_variable("a" + std::to_string(k), -kInf, kInf);
  const int t = lp.add_variable("t", -kInf, 1.0, -1.0);
  for (int r = 0; r < D.rows(); ++r) {
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < n; ++k) row.emplace_back(k, D(r, k));
    row.emplace_back(t, D.row(r).norm());
    lp.add_row(row, RowSense::kLessEqual, d[r]);
  }
  const LpSolution s = solve_lp(lp);
  SlaterReport rep;
  if (s.status != LpStatus::kOptimal) return rep;
  rep.margin = s.x[t];
  rep.feasible = rep.margin >= -1e-12;
  rep.interior = rep.margin > 1e-12;
  if (rep.feasible) rep.witness = s.x.head(n);
  return rep;
}

void UncertaintyProfile::validate(int players, int dim) const {
  require(static_cast<int>(sets.size()) == players,
          "uncertainty: one set per player required");
  for (int i = 0; i < players; ++i)
    require(sets[i].dim() == dim, "uncertainty: set " + std::to_string(i) +
                                      " has the wrong dimension");
}

bool UncertaintyProfile::contains(const Matrix& alpha, double tol) const {
  if (alpha.rows() != players()) return false;
  for (int i = 0; i < players(); ++i)
    if (!sets[i].contains(alpha.row(i).transpose(), tol)) return false;
  return true;
}

UncertaintyProfile uniform_box_profile(int players, const Vector& lo,
                                       const Vector& hi) {
  UncertaintyProfile p;
  p.sets.assign(players, box_polyhedron(lo, hi));
  return p;
}

Matrix sample_alpha_at(const UncertaintyProfile& profile, std::uint64_t seed,
                       std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k),
                    static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int N = profile.players();
  require(N >= 1, "sample_alpha: empty profile");
  const int n = profile.sets[0].dim();
  Matrix alpha(N, n);
  for (int i = 0; i < N; ++i) {
    const Polyhedron& set = profile.sets[i];
    const auto box = set.bounding_box();
    if (!box) throw ValidationError("sample_alpha: set " + std::to_string(i) +
                                    " is unbounded");
    const auto& [lo, hi] = *box;
    const bool exact_box = set.as_box().has_value();
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1'000'000)
        throw NumericalError("sample_alpha: rejection sampling failed for set " +
                             std::to_string(i));
      Vector a(n);
      for (int c = 0; c < n; ++c) a[c] = lo[c] + (hi[c] - lo[c]) * unit(rng);
      if (exact_box || set.contains(a)) {
        alpha.row(i) = a.transpose();
        break;
      }
    }
  }
  return alpha;
}

std::vector<Matrix> sample_alpha(const UncertaintyProfile& profile,
                                 std::uint64_t seed, std::size_t count) {
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sample_alpha_at(profile, seed, k));
  return out;
}

void Dataset::validate() const {
  for (std::size_t k = 0; k < points.size(); ++k) {
    const DataPoint& p = points[k];
    require(p.k == k + 1, "dataset: indices must run 1..M contiguously");
    require(p.alpha.rows() == p.x_star.rows() && p.alpha.cols() == p.x_star.cols(),
            "dataset: alpha and x_star shapes differ at k = " + std::to_string(p.k));
    require(p.alpha.rows() == points[0].alpha.rows() &&
                p.alpha.cols() == points[0].alpha.cols(),
            "dataset: inconsistent shapes");
    require(p.alpha.allFinite() && p.x_star.allFinite() && std::isfinite(p.residual),
            "dataset: non-finite value at k = " + std::to_string(p.k));
  }
}

std::uint64_t game_fingerprint(const GameConfig& config) {
  std::string s = "players=" + std::to_string(config.players) +
                  ";dim=" + std::to_string(config.dim) +
                  ";budget=" + format_double(config.budget) + ";l=";
  for (double v : config.payoff.l) s += format_double(v) + ",";
  s += ";h=";
  for (double v : config.payoff.h) s += format_double(v) + ",";
  s += ";q=" + format_double(config.payoff.q) +
       ";p0=" + format_double(config.payoff.p0);
  return fnv1a(s);
}

Dataset generate_dataset(const GameConfig& config,
                         const UncertaintyProfile& profile, std::size_t M,
                         std::uint64_t seed, const SolverOptions& opts,
                         unsigned threads) {
  config.validate();
  profile.validate(config.players, config.dim);
  require(config.beta_true.has_value(),
          "generate_dataset: beta_true is required to simulate the solver");
  Dataset ds;
  ds.seed = seed;
  ds.fingerprint = game_fingerprint(config);
  ds.points.resize(M);

  auto label = [&](std::size_t k) {
    DataPoint& p = ds.points[k];
    p.k = k + 1;
    p.alpha = sample_alpha_at(profile, seed, k);
    SolverOptions local = opts;
    local.observer = nullptr;
    const VgneResult r = solve_vgne(config, p.alpha, local);
    p.x_star = r.x_star;
    p.residual = r.residual;
    return r.converged;
  };

  std::vector<char> ok(M, 0);
  if (threads <= 1 || M < 2) {
    for (std::size_t k = 0; k < M; ++k) {
      ok[k] = label(k);
      if (!ok[k])
        throw ConvergenceError("generate_dataset: solve did not converge at k = " +
                                   std::to_string(k + 1),
                               k + 1);
    }
    return ds;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < M; k += threads) ok[k] = label(k);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t k = 0; k < M; ++k)
    if (!ok[k])
      throw ConvergenceError("generate_dataset: solve did not converge at k = " +
                                 std::to_string(k + 1),
                             k + 1);
  return ds;
}

}  // namespace aggrobust
