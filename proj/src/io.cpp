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

#include "aggrobust/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "aggrobust/numfmt.hpp"

namespace aggrobust {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError("config: " + path + ": " + msg);
}

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
}

const json& member(const json& j, const std::string& path, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

Vector as_vector(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  Vector out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<int>(i)] = as_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Matrix as_matrix(const json& v, const std::string& path, int cols) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of rows");
  Matrix out(static_cast<int>(v.size()), cols);
  for (std::size_t r = 0; r < v.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const Vector row = as_vector(v[r], rp);
    if (row.size() != cols) fail(rp, "expected " + std::to_string(cols) + " entries");
    out.row(static_cast<int>(r)) = row.transpose();
  }
  return out;
}

Polyhedron checked_polyhedron(const Matrix& D, const Vector& d, const std::string& path) {
  if (d.size() != D.rows()) fail(path + ".d", "length must equal the row count of D");
  for (int r = 0; r < D.rows(); ++r)
    if (D.row(r).norm() == 0.0) fail(path + ".D", "zero row " + std::to_string(r));
  try {
    return Polyhedron::normalized(D, d);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json profile_json(const Matrix& x) {
  if (x.cols() == 1) return vector_json(x.col(0));
  json rows = json::array();
  for (int i = 0; i < x.rows(); ++i) rows.push_back(vector_json(x.row(i).transpose()));
  return rows;
}

Vector vector_from(const json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + ": expected an array");
  Vector out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError(what + ": expected numbers");
    out[static_cast<int>(i)] = v[i].get<double>();
  }
  return out;
}

Matrix profile_from(const json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + ": expected an array");
  if (v.empty() || v[0].is_number()) {
    const Vector flat = vector_from(v, what);
    return Matrix(flat);
  }
  Matrix out(static_cast<int>(v.size()), static_cast<int>(v[0].size()));
  for (std::size_t r = 0; r < v.size(); ++r) {
    const Vector row = vector_from(v[r], what);
    if (row.size() != out.cols()) throw ValidationError(what + ": ragged rows");
    out.row(static_cast<int>(r)) = row.transpose();
  }
  return out;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what + ": JSON parse error: " + e.what());
  }
}

template <typename T>
T json_get(const json& j, const std::string& key, const std::string& what) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(what + ": missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(what + ": '" + key + "' has the wrong type");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string dataset_header(int players, int dim) {
  std::string h = "k";
  for (int i = 1; i <= players; ++i)
    for (int c = 1; c <= dim; ++c) h += ",alpha_" + std::to_string(i) + "_" + std::to_string(c);
  for (int i = 1; i <= players; ++i)
    for (int c = 1; c <= dim; ++c) h += ",x_" + std::to_string(i) + "_" + std::to_string(c);
  return h + ",residual";
}

std::uint64_t parse_u64(const std::string& s, int base, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, base);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": not an unsigned integer: '" + s + "'");
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

LoadedConfig parse_config(const std::string& text, const std::string& source) {
  const json root = parse_json(text, "config " + source);
  only_keys(root, "", {"players", "dim", "budget", "payoff", "beta_true", "uncertainty", "solver"});

  LoadedConfig cfg;
  cfg.source = source;
  cfg.content_hash = fnv1a(text);
  GameConfig& g = cfg.game;

  const long long players = as_integer(member(root, "", "players"), "players");
  if (players < 1) fail("players", "must be >= 1");
  g.players = static_cast<int>(players);
  const long long dim = root.contains("dim") ? as_integer(root["dim"], "dim") : 1;
  if (dim < 1) fail("dim", "must be >= 1");
  g.dim = static_cast<int>(dim);
  g.budget = as_number(member(root, "", "budget"), "budget");
  if (!(g.budget > 0.0)) fail("budget", "must be > 0");

  const json& payoff = member(root, "", "payoff");
  only_keys(payoff, "payoff", {"l", "h", "q", "p0"});
  g.payoff.l = as_vector(member(payoff, "payoff", "l"), "payoff.l");
  g.payoff.h = as_vector(member(payoff, "payoff", "h"), "payoff.h");
  g.payoff.q = as_number(member(payoff, "payoff", "q"), "payoff.q");
  g.payoff.p0 = as_number(member(payoff, "payoff", "p0"), "payoff.p0");
  if (g.payoff.l.size() != g.players) fail("payoff.l", "length must equal players");
  if (g.payoff.h.size() != g.players) fail("payoff.h", "length must equal players");
  if (root.contains("beta_true")) {
    g.beta_true = as_vector(root["beta_true"], "beta_true");
    if (g.beta_true->size() != g.players) fail("beta_true", "length must equal players");
  }
  try {
    g.validate();
  } catch (const ValidationError& e) {
    fail("game", e.what());
  }

  const json& unc = member(root, "", "uncertainty");
  only_keys(unc, "uncertainty", {"box", "polyhedra"});
  if (unc.size() != 1) fail("uncertainty", "give exactly one of 'box' or 'polyhedra'");
  if (unc.contains("box")) {
    const json& box = unc["box"];
    only_keys(box, "uncertainty.box", {"lo", "hi"});
    const Vector lo = as_vector(member(box, "uncertainty.box", "lo"), "uncertainty.box.lo");
    const Vector hi = as_vector(member(box, "uncertainty.box", "hi"), "uncertainty.box.hi");
    if (lo.size() != g.dim) fail("uncertainty.box.lo", "length must equal dim");
    if (hi.size() != g.dim) fail("uncertainty.box.hi", "length must equal dim");
    for (int c = 0; c < g.dim; ++c)
      if (lo[c] > hi[c]) fail("uncertainty.box", "lo > hi at coordinate " + std::to_string(c));
    cfg.profile = uniform_box_profile(g.players, lo, hi);
  } else {
    const json& list = unc["polyhedra"];
    if (!list.is_array() || static_cast<long long>(list.size()) != players)
      fail("uncertainty.polyhedra", "expected one polyhedron per player");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "uncertainty.polyhedra[" + std::to_string(i) + "]";
      only_keys(list[i], path, {"D", "d"});
      const Matrix D = as_matrix(member(list[i], path, "D"), path + ".D", g.dim);
      const Vector d = as_vector(member(list[i], path, "d"), path + ".d");
      cfg.profile.sets.push_back(checked_polyhedron(D, d, path));
    }
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    only_keys(s, "solver", {"tol", "max_iters", "polish"});
    if (s.contains("tol")) cfg.solver.tol = as_number(s["tol"], "solver.tol");
    if (s.contains("max_iters")) cfg.solver.max_iters = as_integer(s["max_iters"], "solver.max_iters");
    if (s.contains("polish")) {
      if (!s["polish"].is_boolean()) fail("solver.polish", "expected a boolean");
      cfg.solver.polish = s["polish"].get<bool>();
    }
    try {
      cfg.solver.validate();
    } catch (const ValidationError& e) {
      fail("solver", e.what());
    }
  }
  return cfg;
}

LoadedConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path), path);
}

std::string dataset_to_csv(const Dataset& ds, int players, int dim, const std::string& run_id) {
  require(players >= 1 && dim >= 1, "dataset csv: players and dim must be >= 1");
  ds.validate();
  std::string out = "# aggrobust dataset\n";
  out += "# seed=" + std::to_string(ds.seed) + "\n";
  out += "# fingerprint=" + hex64(ds.fingerprint) + "\n";
  out += "# sampling=uniform-box\n";
  if (!run_id.empty()) out += "# run=" + run_id + "\n";
  out += dataset_header(players, dim) + "\n";
  for (const DataPoint& p : ds.points) {
    require(p.alpha.rows() == players && p.alpha.cols() == dim &&
                p.x_star.rows() == players && p.x_star.cols() == dim,
            "dataset csv: point shape does not match players x dim");
    out += std::to_string(p.k);
    for (int i = 0; i < players; ++i)
      for (int c = 0; c < dim; ++c) out += "," + format_double(p.alpha(i, c));
    for (int i = 0; i < players; ++i)
      for (int c = 0; c < dim; ++c) out += "," + format_double(p.x_star(i, c));
    out += "," + format_double(p.residual) + "\n";
  }
  return out;
}

std::map<std::string, std::string> dataset_metadata(const std::string& text) {
  std::map<std::string, std::string> meta;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] != '#') break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::size_t start = 1;
    while (start < eq && line[start] == ' ') ++start;
    meta[line.substr(start, eq - start)] = line.substr(eq + 1);
  }
  return meta;
}

Dataset dataset_from_csv(const std::string& text, int players, int dim,
                         const UncertaintyProfile* profile) {
  require(players >= 1 && dim >= 1, "dataset csv: players and dim must be >= 1");
  Dataset ds;
  const auto meta = dataset_metadata(text);
  if (const auto it = meta.find("seed"); it != meta.end())
    ds.seed = parse_u64(it->second, 10, "dataset csv seed");
  if (const auto it = meta.find("fingerprint"); it != meta.end())
    ds.fingerprint = parse_u64(it->second, 16, "dataset csv fingerprint");

  const std::string expected = dataset_header(players, dim);
  const std::size_t width = 2 + 2 * static_cast<std::size_t>(players) * dim;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.empty() || line[0] == '#') continue;
      if (line != expected)
        throw ValidationError("dataset csv: header mismatch, expected '" + expected + "'");
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    const std::string where = "dataset csv line " + std::to_string(line_no);
    if (cells.size() != width)
      throw ValidationError(where + ": expected " + std::to_string(width) + " fields");
    DataPoint p;
    p.k = parse_u64(cells[0], 10, where);
    p.alpha.resize(players, dim);
    p.x_star.resize(players, dim);
    std::size_t col = 1;
    auto next = [&]() {
      const double v = parse_double(cells[col++]);
      if (!std::isfinite(v)) throw ValidationError(where + ": non-finite value");
      return v;
    };
    for (int i = 0; i < players; ++i)
      for (int c = 0; c < dim; ++c) p.alpha(i, c) = next();
    for (int i = 0; i < players; ++i)
      for (int c = 0; c < dim; ++c) p.x_star(i, c) = next();
    p.residual = next();
    if (profile && !profile->contains(p.alpha))
      throw ValidationError(where + ": alpha lies outside the uncertainty set");
    ds.points.push_back(std::move(p));
  }
  if (!have_header) throw ValidationError("dataset csv: missing header");
  ds.validate();
  return ds;
}

void write_dataset(const std::string& path, const Dataset& ds, int players, int dim,
                   const std::string& run_id) {
  write_text_file(path, dataset_to_csv(ds, players, dim, run_id));
}

Dataset read_dataset(const std::string& path, int players, int dim,
                     const UncertaintyProfile* profile) {
  return dataset_from_csv(read_text_file(path), players, dim, profile);
}

std::string learn_result_to_json(const LearnResult& r, const std::string& run_id) {
  json j;
  j["beta_hat"] = vector_json(r.beta_hat);
  j["gamma"] = vector_json(r.gamma);
  if (r.norm == SlackNorm::kInf && r.delta.size() == 1) j["delta"] = r.delta[0];
  else j["delta"] = vector_json(r.delta);
  j["delta_star"] = r.delta_star();
  j["norm"] = to_string(r.norm);
  j["status"] = r.status;
  j["tie_break_applied"] = r.tie_break_applied;
  j["objective"] = r.objective;
  j["optimal_face_dim_hint"] = r.optimal_face_dim_hint;
  j["lp_iterations"] = r.lp_iterations;
  if (!run_id.empty()) j["run"] = run_id;
  return j.dump(2) + "\n";
}

LearnResult learn_result_from_json(const std::string& text) {
  const std::string what = "learn result";
  const json j = parse_json(text, what);
  if (!j.is_object()) throw ValidationError(what + ": expected an object");
  LearnResult r;
  r.beta_hat = vector_from(json_get<json>(j, "beta_hat", what), what + " beta_hat");
  if (j.contains("gamma")) r.gamma = vector_from(j["gamma"], what + " gamma");
  r.norm = j.contains("norm") ? parse_slack_norm(json_get<std::string>(j, "norm", what))
                              : SlackNorm::kInf;
  const json& d = json_get<json>(j, "delta", what);
  if (d.is_number()) r.delta = Vector::Constant(1, d.get<double>());
  else r.delta = vector_from(d, what + " delta");
  if (j.contains("status")) r.status = json_get<std::string>(j, "status", what);
  if (j.contains("tie_break_applied"))
    r.tie_break_applied = json_get<bool>(j, "tie_break_applied", what);
  if (j.contains("objective")) r.objective = json_get<double>(j, "objective", what);
  if (j.contains("optimal_face_dim_hint"))
    r.optimal_face_dim_hint = json_get<int>(j, "optimal_face_dim_hint", what);
  if (j.contains("lp_iterations")) r.lp_iterations = json_get<long>(j, "lp_iterations", what);
  require(r.beta_hat.allFinite() && r.delta.allFinite(), what + ": values must be finite");
  return r;
}

std::string rgne_result_to_json(const RgneResult& r, const std::string& run_id) {
  json j;
  j["x_star"] = profile_json(r.x_star);
  json ys = json::array();
  for (const Vector& y : r.y_star) ys.push_back(vector_json(y));
  j["y_star"] = ys;
  j["mu_star"] = r.mu_star;
  json ws = json::array();
  for (const Vector& w : r.omega_star) ws.push_back(vector_json(w));
  j["omega_star"] = ws;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  if (!run_id.empty()) j["run"] = run_id;
  return j.dump(2) + "\n";
}

RgneResult rgne_result_from_json(const std::string& text) {
  const std::string what = "rgne result";
  const json j = parse_json(text, what);
  if (!j.is_object()) throw ValidationError(what + ": expected an object");
  RgneResult r;
  r.x_star = profile_from(json_get<json>(j, "x_star", what), what + " x_star");
  for (const json& y : json_get<json>(j, "y_star", what)) r.y_star.push_back(vector_from(y, what));
  if (j.contains("omega_star"))
    for (const json& w : j["omega_star"]) r.omega_star.push_back(vector_from(w, what));
  r.mu_star = json_get<double>(j, "mu_star", what);
  r.residual = json_get<double>(j, "residual", what);
  if (j.contains("iterations")) r.iterations = json_get<long>(j, "iterations", what);
  r.converged = json_get<bool>(j, "converged", what);
  return r;
}

std::string bound_report_to_json(const BoundReport& b, const std::string& run_id) {
  json j;
  j["epsilon"] = b.epsilon;
  j["M"] = b.M;
  j["N"] = b.N;
  j["delta_bound"] = b.delta_bound;
  if (!run_id.empty()) j["run"] = run_id;
  return j.dump(2) + "\n";
}

BoundReport bound_report_from_json(const std::string& text) {
  const std::string what = "bound report";
  const json j = parse_json(text, what);
  if (!j.is_object()) throw ValidationError(what + ": expected an object");
  BoundReport b;
  b.epsilon = json_get<double>(j, "epsilon", what);
  b.M = json_get<long>(j, "M", what);
  b.N = json_get<int>(j, "N", what);
  b.delta_bound = json_get<double>(j, "delta_bound", what);
  return b;
}

std::string violation_to_json(const ViolationEstimate& v, const std::string& run_id) {
  json j;
  j["empirical_v"] = v.empirical_v;
  j["trials"] = v.trials;
  j["violations"] = v.violations;
  j["ci_lo"] = v.ci_lo;
  j["ci_hi"] = v.ci_hi;
  if (!run_id.empty()) j["run"] = run_id;
  return j.dump(2) + "\n";
}

std::string RunManifest::run_id() const {
  std::string s = "tool=" + tool_version + ";command=" + command +
                  ";config=" + hex64(config_hash);
  for (const auto& [name, value] : seeds) s += ";" + name + "=" + std::to_string(value);
  return hex64(fnv1a(s));
}

std::string RunManifest::to_json() const {
  json j;
  j["tool"] = "aggrobust";
  j["tool_version"] = tool_version;
  j["run_id"] = run_id();
  j["command"] = command;
  j["config"] = {{"path", config_path}, {"hash", hex64(config_hash)}};
  json s = json::object();
  for (const auto& [name, value] : seeds) s[name] = value;
  j["seeds"] = s;
  j["outputs"] = outputs;
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace aggrobust
