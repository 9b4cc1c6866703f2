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

#include "aggrobust/vgne.hpp"
#include "oracles.hpp"

using namespace aggrobust;

namespace {

GameConfig single_player(double budget) {
  GameConfig c;
  c.players = 1;
  c.budget = budget;
  c.payoff.l = Vector::Ones(1);
  c.payoff.h = Vector::Constant(1, 10.0);
  c.beta_true = Vector::Ones(1);
  return c;
}

Matrix ones(int n) { return Matrix::Ones(n, 1); }

}  // namespace

TEST_SUITE("vgne") {
  TEST_CASE("single player with a slack budget") {
    const GameConfig c = single_player(100.0);
    const VgneResult r = solve_vgne(c, ones(1));
    REQUIRE(r.converged);
    CHECK(r.x_star(0, 0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.lambda_star == doctest::Approx(0.0));
    CHECK(kkt_residual(c, ones(1), Matrix::Constant(1, 1, 10.0), 0.0) <= 1e-12);
    CHECK(kkt_residual(c, ones(1), Matrix::Constant(1, 1, 10.1), 0.0) > 0.0);
  }

  TEST_CASE("single player with a binding budget") {
    const GameConfig c = single_player(5.0);
    const VgneResult r = solve_vgne(c, ones(1));
    REQUIRE(r.converged);
    CHECK(r.x_star(0, 0) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(r.lambda_star == doctest::Approx(10.0).epsilon(1e-10));
  }

  TEST_CASE("demand-response game at unit parameters matches the active-set oracle") {
    const GameConfig c = oracle::demand_response_game();
    const VgneResult r = solve_vgne(c, ones(4));
    REQUIRE(r.converged);
    const oracle::KktPoint k = oracle::active_set_vgne(c.payoff, *c.beta_true, c.budget, Vector::Ones(4));
    REQUIRE(k.found);
    CHECK((r.x_star.col(0) - k.x).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(r.lambda_star == doctest::Approx(k.lambda).epsilon(1e-9));
    CHECK(k.lambda > 0.0);
    CHECK(r.x_star.sum() == doctest::Approx(75.0).epsilon(1e-12));
    CHECK(kkt_residual(c, ones(4), r.x_star, r.lambda_star) <= 1e-10);
    CHECK(r.residual <= 1e-10);
  }

  TEST_CASE("random parameters agree with the oracle and satisfy complementarity") {
    const GameConfig c = oracle::demand_response_game();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int t = 0; t < 50; ++t) {
      Matrix alpha(4, 1);
      for (int i = 0; i < 4; ++i) alpha(i, 0) = u(rng);
      SolverOptions o;
      const VgneResult r = solve_vgne(c, alpha, o);
      REQUIRE(r.converged);
      const auto k = oracle::active_set_vgne(c.payoff, *c.beta_true, c.budget, alpha.col(0));
      REQUIRE(k.found);
      CHECK((r.x_star.col(0) - k.x).cwiseAbs().maxCoeff() <= 1e-7);
      const double slack = alpha.col(0).dot(r.x_star.col(0)) - c.budget;
      CHECK(std::abs(r.lambda_star * slack) <= 10 * o.tol);
      CHECK(r.lambda_star >= 0.0);
    }
  }

  TEST_CASE("vi gap") {
    const GameConfig c = oracle::demand_response_game();
    const Matrix alpha = ones(4);
    const VgneResult r = solve_vgne(c, alpha);
    REQUIRE(r.converged);
    CHECK(vi_gap(c, alpha, r.x_star, {r.x_star}) == doctest::Approx(0.0));

    std::mt19937_64 rng(23);
    std::vector<StrategyProfile> probes;
    for (int t = 0; t < 10000; ++t) probes.push_back(oracle::feasible_probe(alpha.col(0), c.budget, rng));
    CHECK(vi_gap(c, alpha, r.x_star, probes) >= -1e-8);

    // A feasible point away from the equilibrium, probed along -F.
    const Matrix x0 = Matrix::Constant(4, 1, 5.0);
    const Vector F = oracle::hand_gradient(c.payoff, *c.beta_true, x0.col(0));
    Matrix probe = x0 - 0.01 * F;
    probe = project_nonneg(probe);
    const double scale = std::min(1.0, c.budget / probe.sum());
    probe *= scale;
    CHECK(vi_gap(c, alpha, x0, {probe}) < -1e-3);

    Matrix outside = Matrix::Constant(4, 1, 30.0);
    CHECK_THROWS_AS(vi_gap(c, alpha, r.x_star, {outside}), ValidationError);
  }

  TEST_CASE("deterministic iterates") {
    const GameConfig c = oracle::demand_response_game();
    Matrix alpha(4, 1);
    alpha << 0.3, 1.9, 1.1, 0.7;
    std::vector<double> t1, t2;
    SolverOptions o;
    o.observer = [&](long, double res, const Matrix&) { t1.push_back(res); };
    const VgneResult a = solve_vgne(c, alpha, o);
    o.observer = [&](long, double res, const Matrix&) { t2.push_back(res); };
    const VgneResult b = solve_vgne(c, alpha, o);
    CHECK(a.x_star == b.x_star);
    CHECK(a.lambda_star == b.lambda_star);
    CHECK(t1 == t2);
    CHECK(!t1.empty());
  }

  TEST_CASE("iteration cap reports non-convergence") {
    const GameConfig c = oracle::demand_response_game();
    SolverOptions o;
    o.max_iters = 3;
    o.polish = false;
    const VgneResult r = solve_vgne(c, ones(4), o);
    CHECK_FALSE(r.converged);
    CHECK(r.residual > o.tol);
  }

  TEST_CASE("non-monotone games are refused") {
    GameConfig c = oracle::demand_response_game();
    c.beta_true = Vector::Constant(4, -100.0);
    CHECK_THROWS_AS(solve_vgne(c, ones(4)), ValidationError);
  }

  TEST_CASE("coupling set membership") {
    CHECK(in_coupling_set(ones(2), 1.0, Matrix::Constant(2, 1, 0.5)));
    CHECK_FALSE(in_coupling_set(ones(2), 1.0, Matrix::Constant(2, 1, 0.6)));
    CHECK_FALSE(in_coupling_set(ones(2), 1.0, Matrix::Constant(2, 1, -0.1)));
  }
}
