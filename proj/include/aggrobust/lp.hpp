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

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "aggrobust/common.hpp"

namespace aggrobust {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

/// min c^T x  s.t.  A x (sense) rhs,  lower <= x <= upper.
struct LpProblem {
  Vector c;
  Matrix A;
  Vector rhs;
  std::vector<RowSense> senses;
  Vector lower;
  Vector upper;
  std::vector<std::string> names;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  /// Appends a column (zero in existing rows) and returns its index.
  int add_variable(const std::string& name, double lo, double hi,
                   double cost = 0.0);
  /// Appends a row given as (column, coefficient) pairs.
  int add_row(const std::vector<std::pair<int, double>>& coeffs, RowSense sense,
              double rhs_value);
  /// Column index by name, or -1.
  int column(const std::string& name) const;

  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalError };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::kNumericalError;
  Vector x;
  /// One multiplier per row; >= 0 on >= rows, <= 0 on <= rows (minimization).
  Vector duals;
  /// c - A^T duals, in the original variable space.
  Vector reduced_costs;
  double objective = 0.0;
  double dual_objective = 0.0;
  long iterations = 0;
  /// Nonbasic columns with zero reduced cost at the optimum. Nonzero means
  /// the optimum may not be unique.
  int zero_reduced_cost_nonbasic = 0;
};

enum class PricingRule {
  kBland,             ///< lowest-index entering column throughout
  kDantzigWithBland,  ///< most negative reduced cost, Bland once stalled
};

struct SimplexOptions {
  PricingRule pricing = PricingRule::kDantzigWithBland;
  int degenerate_streak_limit = 50;
  long max_pivots = 0;  ///< 0: automatic cap from problem size
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-10;
  /// Pivots between rebuilds of the tableau from the data; 0: rows + 100.
  long reinvert_every = 0;
};

/// Dense two-phase primal simplex.
LpSolution solve_lp(const LpProblem& p, const SimplexOptions& opts = {});

/// max_r |violation of row r| and of the variable bounds, at `x`.
double primal_infeasibility(const LpProblem& p, const Vector& x);

}  // namespace aggrobust
