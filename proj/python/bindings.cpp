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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aggrobust/numfmt.hpp"
#include "aggrobust/pipeline.hpp"

namespace py = pybind11;
using namespace aggrobust;

namespace {

LearnOptions learn_options(const std::string& norm, const std::string& tie_break) {
  LearnOptions o;
  o.norm = parse_slack_norm(norm);
  if (tie_break == "auto") o.tie_break = TieBreak::kAuto;
  else if (tie_break == "always") o.tie_break = TieBreak::kAlways;
  else if (tie_break == "never") o.tie_break = TieBreak::kNever;
  else throw ValidationError("tie_break must be auto, always or never");
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust equilibria of aggregative games with learned aggregator weights.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<LoadedConfig>(m, "Config")
      .def_property_readonly("players", [](const LoadedConfig& c) { return c.game.players; })
      .def_property_readonly("dim", [](const LoadedConfig& c) { return c.game.dim; })
      .def_property_readonly("budget", [](const LoadedConfig& c) { return c.game.budget; })
      .def_property_readonly("beta_true", [](const LoadedConfig& c) { return c.game.beta_true; })
      .def_property_readonly("source", [](const LoadedConfig& c) { return c.source; })
      .def_property_readonly("content_hash", [](const LoadedConfig& c) { return hex64(c.content_hash); });

  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("source") = "<memory>");

  py::class_<VgneResult>(m, "VgneResult")
      .def_readonly("x_star", &VgneResult::x_star)
      .def_readonly("lambda_star", &VgneResult::lambda_star)
      .def_readonly("residual", &VgneResult::residual)
      .def_readonly("iterations", &VgneResult::iterations)
      .def_readonly("converged", &VgneResult::converged);

  m.def(
      "solve_vgne",
      [](const LoadedConfig& c, const Matrix& alpha) { return solve_vgne(c.game, alpha, c.solver); },
      py::arg("config"), py::arg("alpha"),
      "Variational GNE at a fixed parameter (N x n array), using the config's true weights.");

  py::class_<DataPoint>(m, "DataPoint")
      .def_readonly("alpha", &DataPoint::alpha)
      .def_readonly("x_star", &DataPoint::x_star)
      .def_readonly("residual", &DataPoint::residual)
      .def_readonly("k", &DataPoint::k);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("points", &Dataset::points)
      .def_readonly("seed", &Dataset::seed)
      .def_property_readonly("M", &Dataset::M)
      .def("__len__", &Dataset::M);

  m.def(
      "generate_dataset",
      [](const LoadedConfig& c, std::size_t M, std::uint64_t seed, unsigned threads) {
        return generate_dataset(c.game, c.profile, M, seed, c.solver, threads);
      },
      py::arg("config"), py::arg("M"), py::arg("seed"), py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "dataset_to_csv",
      [](const Dataset& ds, const LoadedConfig& c) { return dataset_to_csv(ds, c.game.players, c.game.dim); },
      py::arg("dataset"), py::arg("config"));
  m.def(
      "dataset_from_csv",
      [](const std::string& text, const LoadedConfig& c) {
        return dataset_from_csv(text, c.game.players, c.game.dim, &c.profile);
      },
      py::arg("text"), py::arg("config"));

  py::class_<LearnResult>(m, "LearnResult")
      .def_readonly("beta_hat", &LearnResult::beta_hat)
      .def_readonly("gamma", &LearnResult::gamma)
      .def_readonly("delta", &LearnResult::delta)
      .def_readonly("tie_break_applied", &LearnResult::tie_break_applied)
      .def_readonly("optimal_face_dim_hint", &LearnResult::optimal_face_dim_hint)
      .def_property_readonly("delta_star", &LearnResult::delta_star)
      .def("to_json", [](const LearnResult& r) { return learn_result_to_json(r); });

  m.def(
      "learn_weights",
      [](const Dataset& ds, const LoadedConfig& c, const std::string& norm, const std::string& tie_break) {
        return learn_weights(ds, quadratic_family(c.game.payoff), c.game.budget,
                             learn_options(norm, tie_break));
      },
      py::arg("dataset"), py::arg("config"), py::arg("norm") = "inf", py::arg("tie_break") = "auto");
  m.def("mee", &mee, py::arg("beta_hat"), py::arg("beta_true"));

  py::class_<RgneResult>(m, "RgneResult")
      .def_readonly("x_star", &RgneResult::x_star)
      .def_readonly("y_star", &RgneResult::y_star)
      .def_readonly("mu_star", &RgneResult::mu_star)
      .def_readonly("omega_star", &RgneResult::omega_star)
      .def_readonly("residual", &RgneResult::residual)
      .def_readonly("iterations", &RgneResult::iterations)
      .def_readonly("converged", &RgneResult::converged)
      .def("to_json", [](const RgneResult& r) { return rgne_result_to_json(r); });

  m.def(
      "solve_rgne",
      [](const LoadedConfig& c, const Vector& beta_hat) {
        return solve_rgne(build_robust_counterpart(c.game.payoff, beta_hat, c.profile, c.game.budget),
                          c.solver);
      },
      py::arg("config"), py::arg("beta_hat"));

  m.def("binomial_tail", &binomial_tail, py::arg("M"), py::arg("N"), py::arg("epsilon"));
  m.def("min_samples", &min_samples, py::arg("epsilon"), py::arg("delta_target"), py::arg("N"));

  py::class_<ViolationEstimate>(m, "ViolationEstimate")
      .def_readonly("empirical_v", &ViolationEstimate::empirical_v)
      .def_readonly("trials", &ViolationEstimate::trials)
      .def_readonly("violations", &ViolationEstimate::violations)
      .def_readonly("ci_lo", &ViolationEstimate::ci_lo)
      .def_readonly("ci_hi", &ViolationEstimate::ci_hi);

  m.def(
      "estimate_violation",
      [](const LoadedConfig& c, const Vector& beta, double delta, long trials, std::uint64_t seed,
         unsigned threads) {
        return estimate_violation(beta, delta, c.game, c.profile, trials, seed, c.solver, threads);
      },
      py::arg("config"), py::arg("beta"), py::arg("delta"), py::arg("trials") = 1000,
      py::arg("seed") = 0, py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_pipeline",
      [](const LoadedConfig& c, std::size_t M, std::uint64_t seed, const std::string& outdir,
         const std::string& norm, double epsilon) {
        PipelineOptions o;
        o.M = M;
        o.seed = seed;
        o.outdir = outdir;
        o.epsilon = epsilon;
        o.learn = learn_options(norm, "auto");
        const PipelineResult r = run_pipeline(c, o);
        py::dict d;
        d["dataset"] = r.dataset;
        d["learned"] = r.learned;
        d["rgne"] = r.rgne;
        d["delta_bound"] = r.bound.delta_bound;
        d["run_id"] = r.manifest.run_id();
        return d;
      },
      py::arg("config"), py::arg("M"), py::arg("seed"), py::arg("outdir") = "",
      py::arg("norm") = "inf", py::arg("epsilon") = 0.1);

  m.attr("__version__") = kToolVersion;
}
