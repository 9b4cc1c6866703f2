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

#include "aggrobust/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "aggrobust/inverse.hpp"

namespace aggrobust {

double binomial_tail(long M, int N, double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, "binomial_tail: epsilon must be in (0, 1)");
  require(M >= 0 && N >= 0, "binomial_tail: M and N must be >= 0");
  if (M <= N) return 1.0;
  // log of C(M, l) eps^l (1 - eps)^(M - l), advanced term by term.
  const double log_ratio = std::log(epsilon) - std::log1p(-epsilon);
  double log_term = static_cast<double>(M) * std::log1p(-epsilon);
  double log_max = log_term;
  std::vector<double> logs;
  logs.reserve(N + 1);
  for (int l = 0; l <= N; ++l) {
    logs.push_back(log_term);
    log_max = std::max(log_max, log_term);
    log_term += std::log(static_cast<double>(M - l) / static_cast<double>(l + 1)) + log_ratio;
  }
  double acc = 0.0;
  for (double lt : logs) acc += std::exp(lt - log_max);
  return std::clamp(std::exp(log_max + std::log(acc)), 0.0, 1.0);
}

BoundReport make_bound_report(long M, int N, double epsilon) {
  return BoundReport{epsilon, M, N, binomial_tail(M, N, epsilon)};
}

long min_samples(double epsilon, double delta_target, int N) {
  require(epsilon > 0.0 && epsilon < 1.0, "min_samples: epsilon must be in (0, 1)");
  require(delta_target > 0.0 && delta_target < 1.0,
          "min_samples: confidence must be in (0, 1)");
  require(N >= 0, "min_samples: N must be >= 0");
  // The tail equals 1 up to M = N and is nonincreasing afterwards.
  long lo = N;
  long hi = N + 1;
  while (binomial_tail(hi, N, epsilon) > delta_target) {
    lo = hi;
    require(hi < (1L << 40), "min_samples: target unreachable");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (binomial_tail(mid, N, epsilon) <= delta_target) hi = mid;
    else lo = mid;
  }
  return hi;
}

ViolationEstimate wilson_estimate(long violations, long trials) {
  require(trials >= 1 && violations >= 0 && violations <= trials,
          "wilson_estimate: invalid counts");
  constexpr double z = 1.959963984540054;
  ViolationEstimate est;
  est.trials = trials;
  est.violations = violations;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(violations) / n;
  est.empirical_v = p;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  est.ci_lo = std::clamp(centre - half, 0.0, p);
  est.ci_hi = std::clamp(centre + half, p, 1.0);
  return est;
}

ViolationEstimate estimate_violation(const Vector& beta, double delta,
                                     const GameConfig& config,
                                     const UncertaintyProfile& profile,
                                     long trials, std::uint64_t seed,
                                     const SolverOptions& opts, unsigned threads) {
  config.validate();
  profile.validate(config.players, config.dim);
  require(config.beta_true.has_value(),
          "estimate_violation: beta_true is required for fresh labels");
  require(trials >= 1, "estimate_violation: trials must be >= 1");
  require(beta.size() == config.players, "estimate_violation: beta length mismatch");
  require(delta >= 0.0, "estimate_violation: delta must be >= 0");

  const GradientFamily family = quadratic_family(config.payoff);
  std::vector<char> violated(trials, 0), failed(trials, 0);
  SolverOptions local = opts;
  local.observer = nullptr;
  auto check = [&](long t) {
    DataPoint p;
    p.alpha = sample_alpha_at(profile, seed, static_cast<std::uint64_t>(t));
    const VgneResult r = solve_vgne(config, p.alpha, local);
    if (!r.converged) {
      failed[t] = 1;
      return;
    }
    p.x_star = r.x_star;
    violated[t] = !in_feasibility_set(p, family, config.budget, beta, delta);
  };

  if (threads <= 1) {
    for (long t = 0; t < trials; ++t) check(t);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
          try {
            for (long t = w; t < trials; t += threads) check(t);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (long t = 0; t < trials; ++t)
    if (failed[t])
      throw ConvergenceError("estimate_violation: fresh solve did not converge at trial " +
                                 std::to_string(t + 1),
                             static_cast<std::size_t>(t + 1));
  long count = 0;
  for (char v : violated) count += v;
  return wilson_estimate(count, trials);
}

}  // namespace aggrobust
