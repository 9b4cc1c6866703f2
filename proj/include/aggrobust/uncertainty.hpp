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

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "aggrobust/game.hpp"
#include "aggrobust/vgne.hpp"

namespace aggrobust {

/// {alpha : D alpha <= d} with unit-norm rows, verified nonempty.
class Polyhedron {
 public:
  /// Throws ValidationError unless every row of D has unit norm (1e-9) and
  /// the set is nonempty.
  Polyhedron(Matrix D, Vector d);

  /// Rescales each row (and its right-hand side) to unit norm first.
  static Polyhedron normalized(Matrix D, Vector d);

  const Matrix& D() const { return D_; }
  const Vector& d() const { return d_; }
  int rows() const { return static_cast<int>(D_.rows()); }
  int dim() const { return static_cast<int>(D_.cols()); }

  bool contains(const Vector& alpha, double tol = 1e-12) const;

  /// (lo, hi) when the rows are exactly +-e_c pairs covering every coordinate.
  std::optional<std::pair<Vector, Vector>> as_box() const;

  /// Coordinate-wise bounding box, or nullopt when some direction is unbounded.
  std::optional<std::pair<Vector, Vector>> bounding_box() const;

 private:
  Matrix D_;
  Vector d_;
};

Polyhedron box_polyhedron(const Vector& lo, const Vector& hi);

struct SlaterReport {
  bool feasible = false;
  bool interior = false;  ///< strictly interior witness exists
  Vector witness;         ///< Chebyshev-type centre when feasible
  double margin = 0.0;    ///< largest t with D a + t <= d (capped at 1)
};

SlaterReport slater_check(const Matrix& D, const Vector& d);
inline SlaterReport slater_check(const Polyhedron& p) {
  return slater_check(p.D(), p.d());
}

struct UncertaintyProfile {
  std::vector<Polyhedron> sets;

  int players() const { return static_cast<int>(sets.size()); }
  void validate(int players, int dim) const;
  bool contains(const Matrix& alpha, double tol = 1e-12) const;
};

/// Same box for every player.
UncertaintyProfile uniform_box_profile(int players, const Vector& lo,
                                       const Vector& hi);

/// Draw number k (0-based) from the stream identified by `seed`. Depends only
/// on (seed, k), never on how many other draws were made.
Matrix sample_alpha_at(const UncertaintyProfile& profile, std::uint64_t seed,
                       std::uint64_t k);

std::vector<Matrix> sample_alpha(const UncertaintyProfile& profile,
                                 std::uint64_t seed, std::size_t count);

struct DataPoint {
  Matrix alpha;
  StrategyProfile x_star;
  double residual = 0.0;
  std::size_t k = 0;  ///< 1-based sample index
};

struct Dataset {
  std::vector<DataPoint> points;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;

  std::size_t M() const { return points.size(); }
  /// Indices contiguous from 1 and every point's shape consistent.
  void validate() const;
};

/// Content hash of the game definition, excluding beta_true.
std::uint64_t game_fingerprint(const GameConfig& config);

/// Samples `M` parameters and labels each with the simulated black-box solver.
/// `threads` > 1 distributes the per-sample solves; the output is identical.
Dataset generate_dataset(const GameConfig& config,
                         const UncertaintyProfile& profile, std::size_t M,
                         std::uint64_t seed, const SolverOptions& opts = {},
                         unsigned threads = 1);

}  // namespace aggrobust
