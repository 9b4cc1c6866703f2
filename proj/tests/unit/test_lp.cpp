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

#include <doctest.h>

#include <random>

#include "aggrobust/lp.hpp"
#include "oracles.hpp"

using namespace aggrobust;

namespace {

LpStatus expected(oracle::LpVerdict v) {
  switch (v) {
    case oracle::LpVerdict::kOptimal: return LpStatus::kOptimal;
    case oracle::LpVerdict::kInfeasible: return LpStatus::kInfeasible;
    case oracle::LpVerdict::kUnbounded: return LpStatus::kUnbounded;
  }
  return LpStatus::kNumericalError;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("one variable bounded below by a row") {
    LpProblem p;
    const int x = p.add_variable("x", -kInf, kInf, 1.0);
    p.add_row({{x, 1.0}}, RowSense::kGreaterEqual, 1.0);
    const LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.duals[0] == doctest::Approx(1.0));
  }

  TEST_CASE("contradictory rows are infeasible") {
    LpProblem p;
    const int x = p.add_variable("x", -kInf, kInf, 1.0);
    p.add_row({{x, 1.0}}, RowSense::kLessEqual, 0.0);
    p.add_row({{x, 1.0}}, RowSense::kGreaterEqual, 1.0);
    CHECK(solve_lp(p).status == LpStatus::kInfeasible);
  }

  TEST_CASE("unbounded ray") {
    LpProblem p;
    const int x = p.add_variable("x", 0.0, kInf, -1.0);
    const int y = p.add_variable("y", 0.0, kInf, 0.0);
    p.add_row({{x, 1.0}, {y, -1.0}}, RowSense::kLessEqual, 2.0);
    CHECK(solve_lp(p).status == LpStatus::kUnbounded);
    CHECK(std::string(to_string(LpStatus::kUnbounded)) == "unbounded");
  }

  TEST_CASE("equality rows and free columns") {
    // min x + 2y  s.t. x + y = 3, x - y <= 1, y free, x >= 0
    LpProblem p;
    const int x = p.add_variable("x", 0.0, kInf, 1.0);
    const int y = p.add_variable("y", -kInf, kInf, 2.0);
    p.add_row({{x, 1.0}, {y, 1.0}}, RowSense::kEqual, 3.0);
    p.add_row({{x, 1.0}, {y, -1.0}}, RowSense::kLessEqual, 1.0);
    const LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(s.x[0] == doctest::Approx(2.0));
    CHECK(s.x[1] == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(4.0));
    CHECK(p.column("y") == 1);
    CHECK(p.column("z") == -1);
  }

  TEST_CASE("degenerate vertex does not cycle") {
    // A classic cycling example for the most-negative rule without safeguards.
    LpProblem p;
    for (int j = 0; j < 4; ++j) p.add_variable("x" + std::to_string(j), 0.0, kInf);
    p.c << -0.75, 150, -0.02, 6;
    p.add_row({{0, 0.25}, {1, -60}, {2, -0.04}, {3, 9}}, RowSense::kLessEqual, 0.0);
    p.add_row({{0, 0.5}, {1, -90}, {2, -0.02}, {3, 3}}, RowSense::kLessEqual, 0.0);
    p.add_row({{2, 1.0}}, RowSense::kLessEqual, 1.0);
    for (PricingRule rule : {PricingRule::kBland, PricingRule::kDantzigWithBland}) {
      SimplexOptions o;
      o.pricing = rule;
      const LpSolution s = solve_lp(p, o);
      REQUIRE(s.status == LpStatus::kOptimal);
      CHECK(s.objective == doctest::Approx(-0.05));
    }
  }

  TEST_CASE("random problems agree with vertex enumeration") {
    std::mt19937_64 rng(2024);
    int counts[3] = {0, 0, 0};
    for (int t = 0; t < 150; ++t) {
      const LpProblem p = oracle::random_lp(rng);
      const oracle::LpOracleResult o = oracle::brute_force_lp(p);
      const LpSolution s = solve_lp(p);
      INFO("problem " << t);
      REQUIRE(s.status == expected(o.verdict));
      ++counts[static_cast<int>(o.verdict)];
      if (s.status != LpStatus::kOptimal) continue;
      CHECK(std::abs(s.objective - o.objective) <= 1e-9 * std::max(1.0, std::abs(o.objective)));
      CHECK(primal_infeasibility(p, s.x) <= 1e-9);
      // Weak and strong duality with correctly signed multipliers.
      CHECK(std::abs(s.objective - s.dual_objective) <= 1e-8 * std::max(1.0, std::abs(s.objective)));
      for (int r = 0; r < p.num_rows(); ++r) {
        if (p.senses[r] == RowSense::kLessEqual) CHECK(s.duals[r] <= 1e-9);
        if (p.senses[r] == RowSense::kGreaterEqual) CHECK(s.duals[r] >= -1e-9);
        const double slack = p.A.row(r).dot(s.x) - p.rhs[r];
        CHECK(std::abs(s.duals[r] * slack) <= 1e-8);
      }
    }
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    CHECK(counts[2] > 0);
  }

  TEST_CASE("reduced costs certify optimality at the bounds") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
      const LpProblem p = oracle::random_lp(rng);
      const LpSolution s = solve_lp(p);
      if (s.status != LpStatus::kOptimal) continue;
      for (int j = 0; j < p.num_vars(); ++j) {
        const double rc = s.reduced_costs[j];
        const bool at_lo = std::abs(s.x[j] - p.lower[j]) <= 1e-9;
        const bool at_hi = std::abs(s.x[j] - p.upper[j]) <= 1e-9;
        if (!at_lo) CHECK(rc <= 1e-9);
        if (!at_hi) CHECK(rc >= -1e-9);
      }
    }
  }

  TEST_CASE("validation") {
    LpProblem p;
    p.add_variable("x", 1.0, 0.0);
    CHECK_THROWS_AS(solve_lp(p), ValidationError);
    LpProblem q;
    q.add_variable("x", 0.0, 1.0);
    CHECK_THROWS_AS(q.add_row({{3, 1.0}}, RowSense::kLessEqual, 0.0), ValidationError);
  }
}
