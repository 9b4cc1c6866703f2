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

#include "aggrobust/cli.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "aggrobust/numfmt.hpp"
#include "aggrobust/pipeline.hpp"

namespace aggrobust {

namespace {

struct Args {
  std::string config, data, out, weights, schedule, outdir;
  std::string norm = "inf", tie_break = "auto";
  long samples = -1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double eps = 0.1, confidence = -1.0, delta = -1.0;
  int players = 0;
  long trials = 1000;
};

std::string join_vector(const Vector& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

TieBreak parse_tie_break(const std::string& s) {
  if (s == "auto") return TieBreak::kAuto;
  if (s == "always") return TieBreak::kAlways;
  if (s == "never") return TieBreak::kNever;
  throw ValidationError("tie-break must be auto, always or never");
}

void write_with_manifest(const std::string& path, const std::string& body, RunManifest man) {
  write_text_file(path, body);
  man.outputs = {path};
  man.finished_utc = utc_timestamp();
  write_text_file(path + ".manifest.json", man.to_json());
}

RunManifest manifest_for(const std::string& command, const LoadedConfig* cfg) {
  RunManifest m;
  m.command = command;
  if (cfg) {
    m.config_path = cfg->source;
    m.config_hash = cfg->content_hash;
  }
  m.started_utc = utc_timestamp();
  return m;
}

int cmd_gen(const Args& a, std::ostream& out) {
  const LoadedConfig cfg = load_config(a.config);
  require(a.samples >= 0, "gen: --samples must be >= 0");
  RunManifest man = manifest_for("gen M=" + std::to_string(a.samples), &cfg);
  man.seeds = {{"seed", a.seed}};
  const Dataset ds = generate_dataset(cfg.game, cfg.profile, static_cast<std::size_t>(a.samples),
                                      a.seed, cfg.solver, a.threads);
  write_with_manifest(a.out, dataset_to_csv(ds, cfg.game.players, cfg.game.dim, man.run_id()), man);
  double worst = 0.0;
  for (const auto& p : ds.points) worst = std::max(worst, p.residual);
  out << "samples " << ds.M() << "\n";
  out << "max_residual " << format_double(worst) << "\n";
  return kExitOk;
}

int cmd_learn(const Args& a, std::ostream& out) {
  const LoadedConfig cfg = load_config(a.config);
  const std::string text = read_text_file(a.data);
  const Dataset ds = dataset_from_csv(text, cfg.game.players, cfg.game.dim, &cfg.profile);
  if (ds.fingerprint != 0 && ds.fingerprint != game_fingerprint(cfg.game))
    throw ValidationError("learn: dataset was generated for a different game");
  LearnOptions lo;
  lo.norm = parse_slack_norm(a.norm);
  lo.tie_break = parse_tie_break(a.tie_break);
  const LearnResult r = learn_weights(ds, quadratic_family(cfg.game.payoff), cfg.game.budget, lo);
  RunManifest man = manifest_for("learn norm=" + a.norm + " tie_break=" + a.tie_break, &cfg);
  man.seeds = {{"dataset_seed", ds.seed}};
  if (!a.out.empty()) write_with_manifest(a.out, learn_result_to_json(r, man.run_id()), man);
  out << "beta_hat " << join_vector(r.beta_hat) << "\n";
  out << "delta " << format_double(r.delta_star()) << "\n";
  out << "tie_break_applied " << (r.tie_break_applied ? "true" : "false") << "\n";
  if (cfg.game.beta_true)
    out << "mee " << format_double(mee(r.beta_hat, *cfg.game.beta_true)) << "\n";
  return kExitOk;
}

int cmd_robust(const Args& a, std::ostream& out) {
  const LoadedConfig cfg = load_config(a.config);
  const LearnResult w = learn_result_from_json(read_text_file(a.weights));
  const RobustGame g = build_robust_counterpart(cfg.game.payoff, w.beta_hat, cfg.profile,
                                                cfg.game.budget);
  const RgneResult r = solve_rgne(g, cfg.solver);
  if (!r.converged)
    throw NumericalError("robust: rGNE solver stopped at residual " + format_double(r.residual));
  RunManifest man = manifest_for("robust", &cfg);
  if (!a.out.empty()) write_with_manifest(a.out, rgne_result_to_json(r, man.run_id()), man);
  out << "x_star " << join_vector(r.x_star.reshaped<Eigen::RowMajor>()) << "\n";
  out << "mu_star " << format_double(r.mu_star) << "\n";
  out << "residual " << format_double(r.residual) << "\n";
  out << "iterations " << r.iterations << "\n";
  return kExitOk;
}

int cmd_bound(const Args& a, std::ostream& out) {
  require(a.players >= 1, "bound: --players must be >= 1");
  if (a.confidence >= 0.0) {
    out << min_samples(a.eps, a.confidence, a.players) << "\n";
    return kExitOk;
  }
  require(a.samples >= 0, "bound: give --samples or --confidence");
  const BoundReport b = make_bound_report(a.samples, a.players, a.eps);
  if (!a.out.empty())
    write_with_manifest(a.out, bound_report_to_json(b), manifest_for("bound", nullptr));
  out << format_fixed(b.delta_bound, 4) << "\n";
  return kExitOk;
}

int cmd_violation(const Args& a, std::ostream& out) {
  const LoadedConfig cfg = load_config(a.config);
  const LearnResult w = learn_result_from_json(read_text_file(a.weights));
  const double delta = a.delta >= 0.0 ? a.delta : w.delta_star();
  const ViolationEstimate v = estimate_violation(w.beta_hat, delta, cfg.game, cfg.profile,
                                                 a.trials, a.seed, cfg.solver, a.threads);
  RunManifest man = manifest_for("violation trials=" + std::to_string(a.trials) +
                                     " delta=" + format_double(delta), &cfg);
  man.seeds = {{"seed", a.seed}};
  if (!a.out.empty()) write_with_manifest(a.out, violation_to_json(v, man.run_id()), man);
  out << "empirical_v " << format_double(v.empirical_v) << "\n";
  out << "violations " << v.violations << "/" << v.trials << "\n";
  out << "ci95 " << format_fixed(v.ci_lo, 4) << " " << format_fixed(v.ci_hi, 4) << "\n";
  return kExitOk;
}

int cmd_experiment(const Args& a, std::ostream& out, std::ostream& err) {
  const LoadedConfig cfg = load_config(a.config);
  const ExperimentSchedule s = load_schedule(a.schedule);
  const ExperimentReport r = run_experiment(cfg, s, a.outdir, a.threads);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  out << "M,median_mee,delta_bound\n";
  for (const auto& row : r.table)
    out << row.M << "," << format_double(row.median_mee) << "," << format_fixed(row.delta_bound, 4)
        << "\n";
  return kExitOk;
}

int cmd_pipeline(const Args& a, std::ostream& out) {
  const LoadedConfig cfg = load_config(a.config);
  PipelineOptions po;
  po.M = a.samples < 0 ? 0 : static_cast<std::size_t>(a.samples);
  po.seed = a.seed;
  po.learn.norm = parse_slack_norm(a.norm);
  po.learn.tie_break = parse_tie_break(a.tie_break);
  po.epsilon = a.eps;
  po.threads = a.threads;
  po.outdir = a.outdir;
  const PipelineResult r = run_pipeline(cfg, po);
  out << "beta_hat " << join_vector(r.learned.beta_hat) << "\n";
  out << "delta " << format_double(r.learned.delta_star()) << "\n";
  out << "x_star " << join_vector(r.rgne.x_star.reshaped<Eigen::RowMajor>()) << "\n";
  out << "delta_bound " << format_fixed(r.bound.delta_bound, 4) << "\n";
  out << "run " << r.manifest.run_id() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            bool color) {
  const std::string red = color ? "\033[31m" : "", reset = color ? "\033[0m" : "";
  CLI::App app{"Learning black-box aggregator weights and robust equilibria", "aggrobust"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);
  Args a;

  auto* gen = app.add_subcommand("gen", "Sample parameters and label them with equilibria");
  gen->add_option("--config", a.config, "Config JSON")->required();
  gen->add_option("--samples", a.samples, "Number of samples M")->required();
  gen->add_option("--seed", a.seed, "64-bit seed")->required();
  gen->add_option("--out", a.out, "Dataset CSV")->required();
  gen->add_option("--threads", a.threads, "Worker threads");

  auto* learn = app.add_subcommand("learn", "Learn aggregator weights from a dataset");
  learn->add_option("--config", a.config, "Config JSON")->required();
  learn->add_option("--data", a.data, "Dataset CSV")->required();
  learn->add_option("--norm", a.norm, "Slack norm")->check(CLI::IsMember({"inf", "l1"}));
  learn->add_option("--tie-break", a.tie_break, "Minimum-norm selection")
      ->check(CLI::IsMember({"auto", "always", "never"}));
  learn->add_option("--out", a.out, "LearnResult JSON");

  auto* robust = app.add_subcommand("robust", "Solve the robust counterpart game");
  robust->add_option("--config", a.config, "Config JSON")->required();
  robust->add_option("--weights", a.weights, "LearnResult JSON")->required();
  robust->add_option("--out", a.out, "RgneResult JSON");

  auto* bound = app.add_subcommand("bound", "Scenario confidence bound");
  bound->add_option("--eps", a.eps, "Violation level epsilon")->required();
  bound->add_option("--players", a.players, "Players N")->required();
  auto* bs = bound->add_option("--samples", a.samples, "Data size M");
  auto* bc = bound->add_option("--confidence", a.confidence, "Target bound; prints minimal M");
  bs->excludes(bc);
  bound->add_option("--out", a.out, "BoundReport JSON")->excludes(bc);

  auto* viol = app.add_subcommand("violation", "Estimate the violation probability");
  viol->add_option("--config", a.config, "Config JSON")->required();
  viol->add_option("--weights", a.weights, "LearnResult JSON")->required();
  viol->add_option("--delta", a.delta, "Slack (default: the learned one)");
  viol->add_option("--trials", a.trials, "Fresh samples");
  viol->add_option("--seed", a.seed, "64-bit seed")->required();
  viol->add_option("--threads", a.threads, "Worker threads");
  viol->add_option("--out", a.out, "Estimate JSON");

  auto* exp = app.add_subcommand("experiment", "MEE versus data size and bound table");
  exp->add_option("--config", a.config, "Config JSON")->required();
  exp->add_option("--schedule", a.schedule, "Schedule JSON")->required();
  exp->add_option("--outdir", a.outdir, "Output directory")->required();
  exp->add_option("--threads", a.threads, "Worker threads");

  auto* pipe = app.add_subcommand("pipeline", "gen, learn, robust and bound in one run");
  pipe->add_option("--config", a.config, "Config JSON")->required();
  pipe->add_option("--samples", a.samples, "Number of samples M")->required();
  pipe->add_option("--seed", a.seed, "64-bit seed")->required();
  pipe->add_option("--outdir", a.outdir, "Output directory")->required();
  pipe->add_option("--norm", a.norm, "Slack norm")->check(CLI::IsMember({"inf", "l1"}));
  pipe->add_option("--tie-break", a.tie_break, "Minimum-norm selection")
      ->check(CLI::IsMember({"auto", "always", "never"}));
  pipe->add_option("--eps", a.eps, "Violation level epsilon");
  pipe->add_option("--threads", a.threads, "Worker threads");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << red << "error: " << reset << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (gen->parsed()) return cmd_gen(a, out);
    if (learn->parsed()) return cmd_learn(a, out);
    if (robust->parsed()) return cmd_robust(a, out);
    if (bound->parsed()) return cmd_bound(a, out);
    if (viol->parsed()) return cmd_violation(a, out);
    if (exp->parsed()) return cmd_experiment(a, out, err);
    if (pipe->parsed()) return cmd_pipeline(a, out);
  } catch (const NumericalError& e) {
    err << red << "numerical error: " << reset << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << red << "error: " << reset << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace aggrobust
