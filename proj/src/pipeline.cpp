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

#include "aggrobust/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "aggrobust/numfmt.hpp"

namespace aggrobust {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(stage) + ": " + e.what(), e.index());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(stage) + ": " + e.what());
  }
}

std::string in_dir(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

PipelineResult run_pipeline(const LoadedConfig& cfg, const PipelineOptions& opts) {
  PipelineResult out;
  RunManifest& man = out.manifest;
  man.command = "pipeline M=" + std::to_string(opts.M) + " norm=" + to_string(opts.learn.norm) +
                " eps=" + format_double(opts.epsilon);
  man.config_path = cfg.source;
  man.config_hash = cfg.content_hash;
  man.seeds = {{"seed", opts.seed}};
  man.started_utc = utc_timestamp();
  const std::string run = man.run_id();
  const GameConfig& game = cfg.game;

  out.dataset = staged("gen", [&] {
    require(opts.M >= 1, "M must be >= 1");
    return generate_dataset(game, cfg.profile, opts.M, opts.seed, cfg.solver, opts.threads);
  });
  out.learned = staged("learn", [&] {
    return learn_weights(out.dataset, quadratic_family(game.payoff), game.budget, opts.learn);
  });
  out.rgne = staged("robust", [&] {
    const RobustGame rg =
        build_robust_counterpart(game.payoff, out.learned.beta_hat, cfg.profile, game.budget);
    RgneResult r = solve_rgne(rg, cfg.solver);
    if (!r.converged)
      throw NumericalError("rGNE solver stopped at residual " + format_double(r.residual));
    return r;
  });
  out.bound = staged("bound", [&] {
    return make_bound_report(static_cast<long>(opts.M), game.players, opts.epsilon);
  });

  if (!opts.outdir.empty()) {
    ensure_dir(opts.outdir);
    const std::string ds = in_dir(opts.outdir, "dataset.csv");
    const std::string lj = in_dir(opts.outdir, "learn.json");
    const std::string rj = in_dir(opts.outdir, "rgne.json");
    const std::string bj = in_dir(opts.outdir, "bound.json");
    write_dataset(ds, out.dataset, game.players, game.dim, run);
    write_text_file(lj, learn_result_to_json(out.learned, run));
    write_text_file(rj, rgne_result_to_json(out.rgne, run));
    write_text_file(bj, bound_report_to_json(out.bound, run));
    man.outputs = {ds, lj, rj, bj};
    man.finished_utc = utc_timestamp();
    write_text_file(in_dir(opts.outdir, "manifest.json"), man.to_json());
  } else {
    man.finished_utc = utc_timestamp();
  }
  return out;
}

void ExperimentSchedule::validate() const {
  for (std::size_t i = 0; i < M.size(); ++i) {
    require(M[i] >= 1, "schedule: M values must be positive");
    require(i == 0 || M[i] > M[i - 1], "schedule: M values must be strictly increasing");
  }
  require(repeats >= 1, "schedule: repeats must be >= 1");
  require(epsilon > 0.0 && epsilon < 1.0, "schedule: epsilon must be in (0, 1)");
}

ExperimentSchedule parse_schedule(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("schedule: JSON parse error: ") + e.what());
  }
  require(j.is_object(), "schedule: expected an object");
  static const std::set<std::string> allowed = {"M", "repeats", "epsilon", "seed", "norm"};
  for (const auto& [key, value] : j.items())
    require(allowed.count(key) > 0, "schedule: " + key + ": unknown key");
  ExperimentSchedule s;
  require(j.contains("M") && j["M"].is_array(), "schedule: M: expected an array of integers");
  for (const json& m : j["M"]) {
    require(m.is_number_integer(), "schedule: M: expected integers");
    s.M.push_back(m.get<long>());
  }
  if (j.contains("repeats")) {
    require(j["repeats"].is_number_integer(), "schedule: repeats: expected an integer");
    s.repeats = j["repeats"].get<int>();
  }
  if (j.contains("epsilon")) {
    require(j["epsilon"].is_number(), "schedule: epsilon: expected a number");
    s.epsilon = j["epsilon"].get<double>();
  }
  if (j.contains("seed")) {
    require(j["seed"].is_number_unsigned(), "schedule: seed: expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("norm")) {
    require(j["norm"].is_string(), "schedule: norm: expected a string");
    s.norm = parse_slack_norm(j["norm"].get<std::string>());
  }
  s.validate();
  return s;
}

ExperimentSchedule load_schedule(const std::string& path) {
  return parse_schedule(read_text_file(path));
}

std::uint64_t derive_seed(std::uint64_t master, long M, int repeat) {
  // splitmix64 finaliser over the packed coordinates
  std::uint64_t z = master ^ (static_cast<std::uint64_t>(M) * 0x9E3779B97F4A7C15ull) ^
                    (static_cast<std::uint64_t>(repeat) * 0xD1B54A32D192ED03ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double median(std::vector<double> v) {
  require(!v.empty(), "median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ExperimentReport run_experiment(const LoadedConfig& cfg, const ExperimentSchedule& schedule,
                                const std::string& outdir, unsigned threads) {
  schedule.validate();
  const GameConfig& game = cfg.game;
  require(game.beta_true.has_value(), "experiment: config needs beta_true to score MEE");
  ExperimentReport rep;
  RunManifest man;
  man.command = "experiment repeats=" + std::to_string(schedule.repeats) +
                " eps=" + format_double(schedule.epsilon) + " norm=" + to_string(schedule.norm);
  man.config_path = cfg.source;
  man.config_hash = cfg.content_hash;
  man.seeds = {{"master", schedule.seed}};
  man.started_utc = utc_timestamp();

  if (schedule.M.empty()) {
    rep.warnings.push_back("empty schedule: nothing to run");
    return rep;
  }

  LearnOptions lo;
  lo.norm = schedule.norm;
  const GradientFamily family = quadratic_family(game.payoff);
  Vector last_beta;
  for (long M : schedule.M) {
    std::vector<double> mees;
    for (int r = 0; r < schedule.repeats; ++r) {
      const std::uint64_t seed = derive_seed(schedule.seed, M, r);
      const Dataset ds = generate_dataset(game, cfg.profile, static_cast<std::size_t>(M), seed,
                                          cfg.solver, threads);
      const LearnResult lr = learn_weights(ds, family, game.budget, lo);
      ExperimentRow row{M, r, seed, mee(lr.beta_hat, *game.beta_true), lr.delta_star()};
      rep.rows.push_back(row);
      mees.push_back(row.mee);
      if (M == schedule.M.back() && r == 0) last_beta = lr.beta_hat;
    }
    rep.table.push_back({M, median(mees), binomial_tail(M, game.players, schedule.epsilon)});
  }

  const RobustGame rg =
      build_robust_counterpart(game.payoff, last_beta, cfg.profile, game.budget);
  SolverOptions so = cfg.solver;
  so.observer = [&rep](long it, double res, const Matrix& x) {
    rep.convergence.push_back({it, res, x});
  };
  const RgneResult rr = solve_rgne(rg, so);
  if (!rr.converged)
    rep.warnings.push_back("rGNE trace stopped at residual " + format_double(rr.residual));

  if (!outdir.empty()) {
    ensure_dir(outdir);
    const std::string a = in_dir(outdir, "mee_vs_M.csv");
    const std::string b = in_dir(outdir, "table1.csv");
    const std::string c = in_dir(outdir, "convergence.csv");
    write_text_file(a, mee_csv(rep));
    write_text_file(b, table1_csv(rep));
    write_text_file(c, convergence_csv(rep));
    man.outputs = {a, b, c};
    man.finished_utc = utc_timestamp();
    write_text_file(in_dir(outdir, "manifest.json"), man.to_json());
  }
  return rep;
}

std::string mee_csv(const ExperimentReport& r) {
  std::string s = "M,repeat,seed,mee,delta_star\n";
  for (const auto& row : r.rows)
    s += std::to_string(row.M) + "," + std::to_string(row.repeat) + "," +
         std::to_string(row.seed) + "," + format_double(row.mee) + "," +
         format_double(row.delta_star) + "\n";
  return s;
}

std::string table1_csv(const ExperimentReport& r) {
  std::string s = "M,median_mee,delta_bound\n";
  for (const auto& row : r.table)
    s += std::to_string(row.M) + "," + format_double(row.median_mee) + "," +
         format_double(row.delta_bound) + "\n";
  return s;
}

std::string convergence_csv(const ExperimentReport& r) {
  std::string s = "iteration,residual";
  if (!r.convergence.empty()) {
    const Matrix& x0 = r.convergence.front().x;
    for (int i = 1; i <= x0.rows(); ++i)
      for (int c = 1; c <= x0.cols(); ++c)
        s += x0.cols() == 1 ? ",x_" + std::to_string(i)
                            : ",x_" + std::to_string(i) + "_" + std::to_string(c);
  }
  s += "\n";
  for (const auto& row : r.convergence) {
    s += std::to_string(row.iteration) + "," + format_double(row.residual);
    for (int i = 0; i < row.x.rows(); ++i)
      for (int c = 0; c < row.x.cols(); ++c) s += "," + format_double(row.x(i, c));
    s += "\n";
  }
  return s;
}

}  // namespace aggrobust
