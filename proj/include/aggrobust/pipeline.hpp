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
#include <string>
#include <vector>

#include "aggrobust/io.hpp"

namespace aggrobust {

struct PipelineOptions {
  std::size_t M = 0;
  std::uint64_t seed = 0;
  LearnOptions learn;
  double epsilon = 0.1;
  unsigned threads = 1;
  /// Artifacts are written here when nonempty.
  std::string outdir;
};

struct PipelineResult {
  Dataset dataset;
  LearnResult learned;
  RgneResult rgne;
  BoundReport bound;
  RunManifest manifest;
};

/// Data construction, inverse learning, robust counterpart and scenario
/// bound in sequence. Stage failures keep their exception type and are
/// prefixed with the stage name (gen, learn, robust, bound).
PipelineResult run_pipeline(const LoadedConfig& cfg, const PipelineOptions& opts);

struct ExperimentSchedule {
  std::vector<long> M;  ///< positive, strictly increasing
  int repeats = 20;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
  SlackNorm norm = SlackNorm::kInf;

  void validate() const;
};

/// Strict JSON: {"M": [...], "repeats": 20, "epsilon": 0.1, "seed": 1,
/// "norm": "inf"}; only "M" is required.
ExperimentSchedule parse_schedule(const std::string& text);
ExperimentSchedule load_schedule(const std::string& path);

/// Seed of repetition `repeat` at data size `M`, derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, long M, int repeat);

struct ExperimentRow {
  long M = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double mee = 0.0;
  double delta_star = 0.0;
};

struct Table1Row {
  long M = 0;
  double median_mee = 0.0;
  double delta_bound = 1.0;
};

struct ConvergenceRow {
  long iteration = 0;
  double residual = 0.0;
  Matrix x;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::vector<Table1Row> table;
  std::vector<ConvergenceRow> convergence;
  std::vector<std::string> warnings;
};

/// Learns at every (M, repeat) of the schedule and tabulates MEE against the
/// scenario bound. The convergence trace is one rGNE solve using the weights
/// learned at the largest M, first repetition. With a nonempty `outdir`,
/// writes mee_vs_M.csv, table1.csv, convergence.csv and manifest.json.
ExperimentReport run_experiment(const LoadedConfig& cfg, const ExperimentSchedule& schedule,
                                const std::string& outdir = "", unsigned threads = 1);

std::string mee_csv(const ExperimentReport& r);
std::string table1_csv(const ExperimentReport& r);
std::string convergence_csv(const ExperimentReport& r);

/// Median of a nonempty sample (mean of the middle pair for even sizes).
double median(std::vector<double> v);

}  // namespace aggrobust
