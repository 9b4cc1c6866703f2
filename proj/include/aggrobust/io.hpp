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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aggrobust/game.hpp"
#include "aggrobust/inverse.hpp"
#include "aggrobust/robust.hpp"
#include "aggrobust/scenario.hpp"
#include "aggrobust/uncertainty.hpp"
#include "aggrobust/vgne.hpp"

namespace aggrobust {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a config file defines.
struct LoadedConfig {
  GameConfig game;
  UncertaintyProfile profile;
  SolverOptions solver;
  std::string source;              ///< path, or a label for in-memory text
  std::uint64_t content_hash = 0;  ///< FNV-1a of the raw bytes
};

/// Strict JSON config. Unknown keys, wrong types, b <= 0, length mismatches
/// and empty uncertainty sets are rejected with the offending field path.
///
/// {
///   "players": 4, "dim": 1, "budget": 75,
///   "payoff": {"l": [...], "h": [...], "q": 0.04, "p0": 5},
///   "beta_true": [...],                               (optional)
///   "uncertainty": {"box": {"lo": [...], "hi": [...]}}
///               or {"polyhedra": [{"D": [[...]], "d": [...]}, ...]},
///   "solver": {"tol": 1e-10, "max_iters": 1000000}    (optional)
/// }
LoadedConfig parse_config(const std::string& text, const std::string& source = "<memory>");
LoadedConfig load_config(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Dataset CSV: optional leading '#' metadata lines, then the header
/// k,alpha_<i>_<c>...,x_<i>_<c>...,residual and one row per sample.
std::string dataset_to_csv(const Dataset& ds, int players, int dim,
                           const std::string& run_id = "");
/// Parses a dataset CSV; when `profile` is given every alpha must lie in it.
Dataset dataset_from_csv(const std::string& text, int players, int dim,
                         const UncertaintyProfile* profile = nullptr);
void write_dataset(const std::string& path, const Dataset& ds, int players,
                   int dim, const std::string& run_id = "");
Dataset read_dataset(const std::string& path, int players, int dim,
                     const UncertaintyProfile* profile = nullptr);

/// Metadata carried in the '#' lines of a dataset CSV.
std::map<std::string, std::string> dataset_metadata(const std::string& text);

std::string learn_result_to_json(const LearnResult& r, const std::string& run_id = "");
LearnResult learn_result_from_json(const std::string& text);

std::string rgne_result_to_json(const RgneResult& r, const std::string& run_id = "");
RgneResult rgne_result_from_json(const std::string& text);

std::string bound_report_to_json(const BoundReport& b, const std::string& run_id = "");
BoundReport bound_report_from_json(const std::string& text);

std::string violation_to_json(const ViolationEstimate& v, const std::string& run_id = "");

/// Provenance of a run. `run_id` hashes the deterministic fields only, so a
/// rerun with the same inputs reproduces every artifact byte for byte.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t config_hash = 0;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<std::string> outputs;
  std::string started_utc;
  std::string finished_utc;
  std::string tool_version = kToolVersion;

  std::string run_id() const;
  std::string to_json() const;
};

std::string utc_timestamp();

}  // namespace aggrobust
