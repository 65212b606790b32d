#pragma once

// File formats: JSON run/study configs (strict, exhaustively validated), CSV
// outputs with 17 significant digits, and JSON manifests.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlcl/diagnostics.hpp"
#include "nlcl/error.hpp"
#include "nlcl/grid.hpp"
#include "nlcl/harness.hpp"
#include "nlcl/initial_data.hpp"
#include "nlcl/kernels.hpp"
#include "nlcl/quadrature.hpp"
#include "nlcl/scheme.hpp"
#include "nlcl/velocity.hpp"
#include "nlcl/version.hpp"

namespace nlcl {

using json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// CSV writers

inline void write_snapshots_csv(std::ostream& os, const GridSpec& grid,
                                const std::vector<SolutionField>& snaps) {
  os << "t,x_center,rho,W\n";
  for (const auto& s : snaps)
    for (std::size_t j = 0; j < s.rho.size(); ++j)
      os << fmt17(s.t) << ',' << fmt17(grid.cell_center(j)) << ',' << fmt17(s.rho[j]) << ','
         << fmt17(s.w[j]) << '\n';
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& recs) {
  os << "n,t,rho_min,rho_max,mass,tv_rho,tv_W,tv_time_increment,entropy_pos_rho,"
        "entropy_pos_W\n";
  for (const auto& d : recs)
    os << d.n << ',' << fmt17(d.t) << ',' << fmt17(d.rho_min) << ',' << fmt17(d.rho_max) << ','
       << fmt17(d.mass) << ',' << fmt17(d.tv_rho) << ',' << fmt17(d.tv_W) << ','
       << fmt17(d.tv_time_increment) << ',' << fmt17(d.entropy_pos_rho) << ','
       << fmt17(d.entropy_pos_W) << '\n';
}

inline void write_study_csv(std::ostream& os, const StudyResult& r, bool wall_time = true) {
  os << "h,epsilon,tau,l1_error,wall_time_s\n";
  for (const auto& row : r.rows)
    os << fmt17(row.h) << ',' << fmt17(row.epsilon) << ',' << fmt17(row.tau) << ','
       << fmt17(row.l1_error) << ',' << fmt17(wall_time ? row.wall_time_s : 0.0) << '\n';
}

inline void write_tv_csv(std::ostream& os, const TvSeries& s) {
  os << "t,tv_rho,tv_W\n";
  for (std::size_t n = 0; n < s.t.size(); ++n)
    os << fmt17(s.t[n]) << ',' << fmt17(s.tv_rho[n]) << ',' << fmt17(s.tv_W[n]) << '\n';
}

/// One row per eps; two columns (rho, W) per (kernel, data) pair.
inline void write_entropy_table_csv(std::ostream& os, const EntropyTable& t) {
  const auto& c = t.config;
  os << "epsilon";
  for (const auto& k : c.kernels)
    for (const auto& d : c.data) {
      const std::string tag = std::string(to_string(k.family())) + "_" + d.name();
      os << ',' << tag << "_rho," << tag << "_W";
    }
  os << '\n';
  for (std::size_t ie = 0; ie < c.epsilons.size(); ++ie) {
    os << fmt17(c.epsilons[ie]);
    for (std::size_t ik = 0; ik < c.kernels.size(); ++ik)
      for (std::size_t id = 0; id < c.data.size(); ++id) {
        const auto& cell = t.at(ie, ik, id);
        os << ',' << fmt17(cell.e_rho) << ',' << fmt17(cell.e_W);
      }
    os << '\n';
  }
}

inline void write_weights_csv(std::ostream& os, const QuadratureWeights& q) {
  os << "k,weight\n";
  for (std::size_t k = 0; k < q.weights.size(); ++k) os << k << ',' << fmt17(q.weights[k]) << '\n';
}

// ---------------------------------------------------------------------------
// Snapshot CSV reader (for `diagnose`)

struct SnapshotFrame {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> w;
};

inline std::vector<SnapshotFrame> read_snapshots_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line.rfind("t,x_center,rho,W", 0) != 0)
    throw ValidationError("snapshot-csv", "line 1: expected header t,x_center,rho,W");
  std::vector<SnapshotFrame> frames;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[4];
    std::stringstream ss(line);
    std::string cell;
    int i = 0;
    for (; i < 4 && std::getline(ss, cell, ','); ++i) {
      // from_chars keeps subnormals that stod rejects as out of range
      const char* end = cell.data() + cell.size();
      const auto [p, ec] = std::from_chars(cell.data(), end, v[i]);
      if (ec != std::errc() || p != end)
        throw ValidationError("snapshot-csv", "line " + std::to_string(lineno) + ": bad number");
    }
    if (i != 4 || std::getline(ss, cell, ','))
      throw ValidationError("snapshot-csv",
                            "line " + std::to_string(lineno) + ": expected 4 columns");
    if (frames.empty() || frames.back().t != v[0]) frames.push_back({v[0], {}, {}, {}});
    frames.back().x.push_back(v[1]);
    frames.back().rho.push_back(v[2]);
    frames.back().w.push_back(v[3]);
  }
  if (frames.empty()) throw ValidationError("snapshot-csv", "no data rows");
  for (const auto& f : frames)
    if (f.x.size() != frames.front().x.size())
      throw ValidationError("snapshot-csv", "snapshots have different cell counts");
  return frames;
}

/// Diagnostics per snapshot; increments and entropy residuals use the
/// previous snapshot with tau = t_k - t_{k-1}, so they are the scheme's
/// per-step quantities only when snapshots are consecutive steps.
inline std::vector<DiagnosticsRecord> diagnose_frames(const std::vector<SnapshotFrame>& frames,
                                                      const VelocityModel& V, double c) {
  const auto& x = frames.front().x;
  if (x.size() < 2) throw ValidationError("snapshot-csv", "need at least 2 cells");
  const double h = x[1] - x[0];
  std::vector<DiagnosticsRecord> out;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    DiagnosticsRecord d;
    d.n = k;
    d.t = f.t;
    d.rho_min = *std::min_element(f.rho.begin(), f.rho.end());
    d.rho_max = *std::max_element(f.rho.begin(), f.rho.end());
    d.mass = mass(f.rho, h);
    d.tv_rho = tv(f.rho);
    d.tv_W = tv(f.w);
    if (k > 0) {
      const auto& p = frames[k - 1];
      const double tau = f.t - p.t;
      if (!(tau > 0.0)) throw ValidationError("snapshot-csv", "snapshot times must increase");
      double inc = 0.0;
      for (std::size_t j = 0; j < f.w.size(); ++j) inc += std::abs(f.w[j] - p.w[j]);
      d.tv_time_increment = inc;
      d.entropy_pos_rho = entropy_step_positive(p.rho, f.rho, V, tau, h, c, {});
      d.entropy_pos_W = entropy_step_positive(p.w, f.w, V, tau, h, c, {});
    }
    out.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config validation

/// Collects every problem in a config before giving up, so a single run
/// reports all of them. Entries read `code:detail`.
class Validator {
public:
  void add(const std::string& code, const std::string& detail) {
    errors_.push_back(detail.empty() ? code : code + ":" + detail);
  }
  bool ok() const noexcept { return errors_.empty(); }
  const std::vector<std::string>& errors() const noexcept { return errors_; }

  void throw_if_failed() const {
    if (ok()) return;
    std::string s;
    for (std::size_t i = 0; i < errors_.size(); ++i) s += (i ? "; " : "") + errors_[i];
    throw ValidationError("validation-error", s);
  }

  /// Reports keys of `obj` that are not in `allowed`.
  void only_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) add("unknown-key", prefix + it.key());
  }

  /// Fetches a required number; records missing-field / invalid-type.
  std::optional<double> number(const json& obj, const std::string& key,
                               const std::string& path, bool required = true) {
    if (!obj.contains(key)) {
      if (required) add("missing-field", path);
      return std::nullopt;
    }
    if (!obj[key].is_number()) {
      add("invalid-type", path + " must be a number");
      return std::nullopt;
    }
    return obj[key].get<double>();
  }

  std::optional<std::string> string(const json& obj, const std::string& key,
                                    const std::string& path, bool required = true) {
    if (!obj.contains(key)) {
      if (required) add("missing-field", path);
      return std::nullopt;
    }
    if (!obj[key].is_string()) {
      add("invalid-type", path + " must be a string");
      return std::nullopt;
    }
    return obj[key].get<std::string>();
  }

  /// Runs fn and turns a thrown nlcl::Error into a recorded entry.
  template <class F>
  auto guard(F&& fn) -> std::optional<decltype(fn())> {
    try {
      return fn();
    } catch (const Error& e) {
      add(e.code(), e.detail());
      return std::nullopt;
    }
  }

private:
  std::vector<std::string> errors_;
};

namespace detail {

inline std::filesystem::path resolve_path(const std::string& p,
                                          const std::filesystem::path& base) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

/// `"linear"` or `{"family": "custom", "table": "file.csv", "first_moment": x}`.
inline std::optional<Kernel> parse_kernel(const json& j, Validator& v, const std::string& path,
                                          const std::filesystem::path& base_dir) {
  if (j.is_string()) return v.guard([&] { return kernel_from_name(j.get<std::string>()); });
  if (!j.is_object()) {
    v.add("invalid-type", path + " must be a string or object");
    return std::nullopt;
  }
  v.only_keys(j, {"family", "table", "first_moment"}, path + ".");
  const auto fam = v.string(j, "family", path + ".family");
  if (!fam) return std::nullopt;
  if (*fam != "custom") return v.guard([&] { return kernel_from_name(*fam); });
  const auto table = v.string(j, "table", path + ".table");
  if (!table) return std::nullopt;
  const auto file = detail::resolve_path(*table, base_dir);
  std::ifstream in(file);
  if (!in) {
    v.add("unreadable-file", file.string());
    return std::nullopt;
  }
  auto k = v.guard([&] { return read_kernel_table(in); });
  if (k && j.contains("first_moment")) {
    const auto m = v.number(j, "first_moment", path + ".first_moment");
    if (m) {
      auto rows = k->table();
      k = Kernel::custom(std::move(rows), *m);
    }
  }
  return k;
}

inline std::optional<InitialDataSpec> parse_initial_data(const json& j, Validator& v,
                                                         const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "riemann_shock") return InitialDataSpec::riemann_shock();
    if (s == "riemann_rarefaction") return InitialDataSpec::riemann_rarefaction();
    if (s == "bell_shaped") return InitialDataSpec::bell_shaped();
    v.add("unknown-initial-data", s);
    return std::nullopt;
  }
  if (!j.is_object()) {
    v.add("invalid-type", path + " must be a string or object");
    return std::nullopt;
  }
  v.only_keys(j, {"kind", "delta", "value", "breakpoints", "values"}, path + ".");
  const auto kind = v.string(j, "kind", path + ".kind");
  if (!kind) return std::nullopt;
  if (*kind == "riemann_shock") return InitialDataSpec::riemann_shock();
  if (*kind == "riemann_rarefaction") return InitialDataSpec::riemann_rarefaction();
  if (*kind == "bell_shaped") return InitialDataSpec::bell_shaped();
  if (*kind == "tv_increase") {
    const auto d = v.number(j, "delta", path + ".delta");
    if (!d) return std::nullopt;
    return v.guard([&] { return InitialDataSpec::tv_increase(*d); });
  }
  if (*kind == "constant") {
    const auto c = v.number(j, "value", path + ".value");
    if (!c) return std::nullopt;
    if (*c < 0.0 || *c > 1.0) {
      v.add("data-out-of-range", path + ".value must lie in [0, 1]");
      return std::nullopt;
    }
    return InitialDataSpec::constant(*c);
  }
  if (*kind == "piecewise_constant") {
    if (!j.contains("breakpoints") || !j.contains("values")) {
      v.add("missing-field", path + (j.contains("values") ? ".breakpoints" : ".values"));
      return std::nullopt;
    }
    try {
      auto bp = j["breakpoints"].get<std::vector<double>>();
      auto vals = j["values"].get<std::vector<double>>();
      for (double x : vals)
        if (x < 0.0 || x > 1.0) {
          v.add("data-out-of-range", path + ".values must lie in [0, 1]");
          return std::nullopt;
        }
      return v.guard(
          [&] { return InitialDataSpec::piecewise_constant(std::move(bp), std::move(vals)); });
    } catch (const json::exception&) {
      v.add("invalid-type", path + " breakpoints/values must be number arrays");
      return std::nullopt;
    }
  }
  v.add("unknown-initial-data", *kind);
  return std::nullopt;
}

inline std::optional<VelocityModel> parse_velocity(const json& j, Validator& v,
                                                   const std::string& path) {
  if (!j.is_string()) {
    v.add("invalid-type", path + " must be a string");
    return std::nullopt;
  }
  return v.guard([&] { return velocity_from_name(j.get<std::string>()); });
}

template <class F>
auto parse_enum(const json& j, Validator& v, const std::string& path, F&& from_name)
    -> std::optional<decltype(from_name(std::string_view{}))> {
  if (!j.is_string()) {
    v.add("invalid-type", path + " must be a string");
    return std::nullopt;
  }
  return v.guard([&] { return from_name(j.get<std::string>()); });
}

// ---------------------------------------------------------------------------
// Run config

struct DiagnosticsOptions {
  bool enabled = true;
  double c = 0.5;
};

struct RunConfig {
  GridSpec grid;
  Kernel kernel = Kernel::linear();
  WeightFamily weight_family = WeightFamily::Exact;
  double tail_tol = kDefaultTailTol;
  std::optional<double> gamma0;
  VelocityModel velocity;
  double lambda = 0.25;
  double epsilon = 1.0;
  InitialDataSpec initial_data;
  double T = 1.0;
  std::vector<double> snapshots;
  DiagnosticsOptions diagnostics;
  std::string output_dir = "out";
  CflVariant cfl_variant = CflVariant::Main;
  json source;  // the config as read, with defaults filled in

  SchemeConfig scheme_config() const {
    return {grid, make_weights(weight_family, kernel, epsilon, grid.h, tail_tol, gamma0),
            velocity, lambda, epsilon, cfl_variant};
  }
};

/// Parses and validates a run config. Every problem is collected; the thrown
/// ValidationError lists them all, separated by "; ".
inline RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir = ".") {
  Validator v;
  RunConfig rc;
  if (!j.is_object()) {
    v.add("invalid-type", "config must be a JSON object");
    v.throw_if_failed();
  }
  v.only_keys(j,
              {"grid", "kernel", "weights", "velocity", "lambda", "epsilon", "initial_data", "T",
               "snapshots", "diagnostics", "output_dir", "cfl_variant"},
              "");

  std::optional<GridSpec> grid;
  if (!j.contains("grid")) {
    v.add("missing-field", "grid");
  } else if (!j["grid"].is_object()) {
    v.add("invalid-type", "grid must be an object");
  } else {
    const auto& g = j["grid"];
    v.only_keys(g, {"x_min", "x_max", "h"}, "grid.");
    const auto a = v.number(g, "x_min", "grid.x_min");
    const auto b = v.number(g, "x_max", "grid.x_max");
    const auto h = v.number(g, "h", "grid.h");
    if (a && b && h) grid = v.guard([&] { return GridSpec::make(*a, *b, *h); });
  }

  std::optional<Kernel> kernel;
  if (!j.contains("kernel"))
    v.add("missing-field", "kernel");
  else
    kernel = parse_kernel(j["kernel"], v, "kernel", base_dir);

  std::optional<WeightFamily> family;
  if (!j.contains("weights")) {
    v.add("missing-field", "weights");
  } else if (j["weights"].is_string()) {
    family = parse_enum(j["weights"], v, "weights", weight_family_from_name);
  } else if (j["weights"].is_object()) {
    const auto& w = j["weights"];
    v.only_keys(w, {"family", "tail_tol", "gamma0"}, "weights.");
    if (!w.contains("family"))
      v.add("missing-field", "weights.family");
    else
      family = parse_enum(w["family"], v, "weights.family", weight_family_from_name);
    if (auto t = v.number(w, "tail_tol", "weights.tail_tol", false)) {
      if (*t > 0.0)
        rc.tail_tol = *t;
      else
        v.add("invalid-parameter", "weights.tail_tol must be positive");
    }
    if (auto g0 = v.number(w, "gamma0", "weights.gamma0", false)) {
      if (*g0 > 0.0 && *g0 < 1.0)
        rc.gamma0 = *g0;
      else
        v.add("out-of-range-gamma0", "weights.gamma0 must lie in (0, 1)");
    }
  } else {
    v.add("invalid-type", "weights must be a string or object");
  }

  std::optional<VelocityModel> vel;
  if (!j.contains("velocity"))
    v.add("missing-field", "velocity");
  else
    vel = parse_velocity(j["velocity"], v, "velocity");

  const auto lambda = v.number(j, "lambda", "lambda");
  if (lambda && !(*lambda > 0.0)) v.add("invalid-parameter", "lambda must be positive");
  const auto eps = v.number(j, "epsilon", "epsilon");
  if (eps && !(*eps > 0.0)) v.add("invalid-parameter", "epsilon must be positive");
  const auto T = v.number(j, "T", "T");
  if (T && !(*T > 0.0)) v.add("invalid-parameter", "T must be positive");

  std::optional<InitialDataSpec> data;
  if (!j.contains("initial_data"))
    v.add("missing-field", "initial_data");
  else
    data = parse_initial_data(j["initial_data"], v, "initial_data");

  if (j.contains("cfl_variant")) {
    if (auto c = parse_enum(j["cfl_variant"], v, "cfl_variant", cfl_variant_from_name))
      rc.cfl_variant = *c;
  }

  if (j.contains("snapshots")) {
    try {
      rc.snapshots = j["snapshots"].get<std::vector<double>>();
      for (double s : rc.snapshots)
        if (s < 0.0) v.add("invalid-parameter", "snapshot times must be >= 0");
    } catch (const json::exception&) {
      v.add("invalid-type", "snapshots must be an array of numbers");
    }
  } else if (T) {
    rc.snapshots = {0.0, *T};
  }

  if (j.contains("diagnostics")) {
    const auto& d = j["diagnostics"];
    if (d.is_boolean()) {
      rc.diagnostics.enabled = d.get<bool>();
    } else if (d.is_object()) {
      v.only_keys(d, {"enabled", "c"}, "diagnostics.");
      if (d.contains("enabled")) {
        if (d["enabled"].is_boolean())
          rc.diagnostics.enabled = d["enabled"].get<bool>();
        else
          v.add("invalid-type", "diagnostics.enabled must be a boolean");
      }
      if (auto c = v.number(d, "c", "diagnostics.c", false)) {
        if (*c >= 0.0 && *c <= 1.0)
          rc.diagnostics.c = *c;
        else
          v.add("invalid-parameter", "diagnostics.c must lie in [0, 1]");
      }
    } else {
      v.add("invalid-type", "diagnostics must be a boolean or object");
    }
  }

  if (j.contains("output_dir")) {
    if (j["output_dir"].is_string())
      rc.output_dir = j["output_dir"].get<std::string>();
    else
      v.add("invalid-type", "output_dir must be a string");
  }

  if (vel && lambda && *lambda > 0.0)
    v.guard([&] {
      check_cfl(*vel, *lambda, rc.cfl_variant);
      return 0;
    });
  if (kernel && family && eps && *eps > 0.0 && grid)
    v.guard([&] {
      return make_weights(*family, *kernel, *eps, grid->h, rc.tail_tol, rc.gamma0);
    });
  if (data && grid) v.guard([&] { return discretize_initial(*data, *grid); });

  v.throw_if_failed();

  rc.grid = *grid;
  rc.kernel = *kernel;
  rc.weight_family = *family;
  rc.velocity = *vel;
  rc.lambda = *lambda;
  rc.epsilon = *eps;
  rc.initial_data = *data;
  rc.T = *T;
  rc.source = j;
  rc.source["snapshots"] = rc.snapshots;
  rc.source["diagnostics"] = {{"enabled", rc.diagnostics.enabled}, {"c", rc.diagnostics.c}};
  rc.source["output_dir"] = rc.output_dir;
  rc.source["cfl_variant"] = std::string(to_string(rc.cfl_variant));
  return rc;
}

inline json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("unreadable-file", p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("invalid-json", p.string() + ": " + e.what());
  }
}

inline json versions_json() {
  return {{"nlcl", kVersion},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)},
          {"json", "nlohmann " + std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

inline json run_manifest(const RunConfig& rc, const SchemeConfig& sc, const RunResult& res,
                         bool wall_time = true) {
  json m;
  m["config"] = rc.source;
  m["resolved"] = {{"num_cells", sc.grid.num_cells},
                   {"tau", sc.tau()},
                   {"num_steps", res.num_steps},
                   {"final_time", res.final_time},
                   {"requested_T", rc.T},
                   {"weights",
                    {{"family", std::string(to_string(sc.weights.family))},
                     {"K", sc.weights.last_index()},
                     {"tail_mass", sc.weights.tail_mass},
                     {"sum", sc.weights.sum()},
                     {"folds_tail", sc.weights.folds_tail()}}},
                   {"cfl_bound", max_cfl_ratio(sc.velocity, sc.cfl_variant)}};
  m["versions"] = versions_json();
  m["wall_time_s"] = wall_time ? res.wall_time_s : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Study configs

inline void parse_domain(const json& j, Validator& v, double& x_min, double& x_max) {
  if (!j.contains("domain")) return;
  try {
    const auto d = j["domain"].get<std::vector<double>>();
    if (d.size() != 2 || !(d[1] > d[0])) {
      v.add("invalid-parameter", "domain must be [x_min, x_max] with x_min < x_max");
      return;
    }
    x_min = d[0];
    x_max = d[1];
  } catch (const json::exception&) {
    v.add("invalid-type", "domain must be an array of two numbers");
  }
}

inline std::optional<std::vector<double>> parse_number_list(const json& j, const std::string& key,
                                                            Validator& v, bool required) {
  if (!j.contains(key)) {
    if (required) v.add("missing-field", key);
    return std::nullopt;
  }
  try {
    return j[key].get<std::vector<double>>();
  } catch (const json::exception&) {
    v.add("invalid-type", key + " must be an array of numbers");
    return std::nullopt;
  }
}

/// Convergence / quadrature-comparison config.
inline StudySpec parse_study_spec(const json& j, const std::filesystem::path& base_dir,
                                  std::vector<WeightFamily>* families = nullptr) {
  Validator v;
  StudySpec s;
  if (!j.is_object()) {
    v.add("invalid-type", "config must be a JSON object");
    v.throw_if_failed();
  }
  std::set<std::string> keys{"data",  "kernel",      "weights", "velocity",   "path",
                             "fixed_eps", "h_list",  "lambda",  "cfl_variant", "T",
                             "domain", "target",     "refine",  "fit_points", "tail_tol"};
  if (families) keys.insert("families");
  v.only_keys(j, keys, "");

  if (j.contains("data")) {
    if (auto d = parse_initial_data(j["data"], v, "data")) s.data = *d;
  }
  if (j.contains("kernel")) {
    if (auto k = parse_kernel(j["kernel"], v, "kernel", base_dir)) s.kernel = *k;
  }
  if (j.contains("weights")) {
    if (auto f = parse_enum(j["weights"], v, "weights", weight_family_from_name))
      s.weight_family = *f;
  }
  if (j.contains("velocity")) {
    if (auto vm = parse_velocity(j["velocity"], v, "velocity")) s.velocity = *vm;
  }
  if (j.contains("path")) {
    if (auto p = parse_enum(j["path"], v, "path", limit_path_from_name)) s.path = *p;
  }
  if (auto e = v.number(j, "fixed_eps", "fixed_eps", false)) s.fixed_eps = *e;
  if (auto hl = parse_number_list(j, "h_list", v, false)) s.h_list = *hl;
  if (auto l = v.number(j, "lambda", "lambda", false)) s.lambda = *l;
  if (j.contains("cfl_variant")) {
    if (auto c = parse_enum(j["cfl_variant"], v, "cfl_variant", cfl_variant_from_name))
      s.cfl_variant = *c;
  }
  if (auto T = v.number(j, "T", "T", false)) s.T = *T;
  parse_domain(j, v, s.x_min, s.x_max);
  if (j.contains("target")) {
    if (auto t = parse_enum(j["target"], v, "target", target_from_name)) s.target = *t;
  }
  if (auto r = v.number(j, "refine", "refine", false)) {
    if (*r >= 2.0 && *r == std::floor(*r))
      s.refine = static_cast<std::size_t>(*r);
    else
      v.add("invalid-parameter", "refine must be an integer >= 2");
  }
  if (auto f = v.number(j, "fit_points", "fit_points", false)) {
    if (*f >= 0.0 && *f == std::floor(*f))
      s.fit_points = static_cast<std::size_t>(*f);
    else
      v.add("invalid-parameter", "fit_points must be a nonnegative integer");
  }
  if (auto t = v.number(j, "tail_tol", "tail_tol", false)) {
    if (*t > 0.0)
      s.tail_tol = *t;
    else
      v.add("invalid-parameter", "tail_tol must be positive");
  }
  if (families) {
    families->clear();
    if (j.contains("families") && j["families"].is_array()) {
      for (const auto& f : j["families"])
        if (auto wf = parse_enum(f, v, "families[]", weight_family_from_name))
          families->push_back(*wf);
    } else if (j.contains("families")) {
      v.add("invalid-type", "families must be an array of strings");
    } else {
      *families = {WeightFamily::Exact, WeightFamily::Riemann, WeightFamily::NormalizedRiemann};
    }
  }
  v.guard([&] {
    s.validate();
    return 0;
  });
  v.throw_if_failed();
  return s;
}

inline json study_spec_json(const StudySpec& s) {
  std::optional<std::pair<double, double>> rs = s.data.riemann_states();
  json data = {{"kind", s.data.name()}};
  if (s.data.kind == InitialDataSpec::Kind::TvIncrease) data["delta"] = s.data.delta;
  if (s.data.kind == InitialDataSpec::Kind::Constant) data["value"] = s.data.value;
  if (s.data.kind == InitialDataSpec::Kind::PiecewiseConstant) {
    data["breakpoints"] = s.data.breakpoints;
    data["values"] = s.data.values;
  }
  (void)rs;
  json kernel = std::string(to_string(s.kernel.family()));
  if (s.kernel.family() == KernelFamily::CustomTable) {
    json rows = json::array();
    for (const auto& r : s.kernel.table()) rows.push_back({r.z_left, r.z_right, r.value});
    kernel = {{"family", "custom"}, {"rows", rows}};
  }
  return {{"data", data},
          {"kernel", kernel},
          {"weights", std::string(to_string(s.weight_family))},
          {"velocity", std::string(to_string(s.velocity.family))},
          {"path", std::string(to_string(s.path))},
          {"fixed_eps", s.fixed_eps},
          {"h_list", s.h_list},
          {"lambda", s.lambda},
          {"cfl_variant", std::string(to_string(s.cfl_variant))},
          {"T", s.T},
          {"domain", {s.x_min, s.x_max}},
          {"target", std::string(to_string(s.target))},
          {"refine", s.refine},
          {"fit_points", s.fit_points},
          {"tail_tol", s.tail_tol}};
}

inline json study_result_json(const StudyResult& r, bool wall_time = true) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"h", row.h},
                    {"epsilon", row.epsilon},
                    {"tau", row.tau},
                    {"l1_error", row.l1_error},
                    {"num_steps", row.num_steps},
                    {"final_time", row.final_time},
                    {"reference", row.reference_kind},
                    {"wall_time_s", wall_time ? row.wall_time_s : 0.0}});
  const double tv0 = tv(discretize_initial(
      r.spec.data, GridSpec::make(r.spec.x_min, r.spec.x_max, r.spec.h_list.back())));
  return {{"slope", r.slope},
          {"fit_points", r.fit_points},
          {"spec", study_spec_json(r.spec)},
          {"rows", rows},
          {"kuznetsov_K", kuznetsov_constants(r, tv0)},
          {"versions", versions_json()}};
}

inline TvStudyConfig parse_tv_study(const json& j, const std::filesystem::path& base_dir) {
  Validator v;
  TvStudyConfig c;
  if (!j.is_object()) {
    v.add("invalid-type", "config must be a JSON object");
    v.throw_if_failed();
  }
  v.only_keys(j,
              {"epsilons", "h", "kernel", "weights", "velocity", "lambda", "T", "domain",
               "return_tol", "data"},
              "");
  if (auto e = parse_number_list(j, "epsilons", v, false)) c.epsilons = *e;
  for (double e : c.epsilons)
    if (!(e > 0.0)) v.add("invalid-parameter", "epsilons must be positive");
  if (auto h = v.number(j, "h", "h", false)) c.h = *h;
  if (j.contains("kernel")) {
    if (auto k = parse_kernel(j["kernel"], v, "kernel", base_dir)) c.kernel = *k;
  }
  if (j.contains("weights")) {
    if (auto f = parse_enum(j["weights"], v, "weights", weight_family_from_name))
      c.weight_family = *f;
  }
  if (j.contains("velocity")) {
    if (auto vm = parse_velocity(j["velocity"], v, "velocity")) c.velocity = *vm;
  }
  if (auto l = v.number(j, "lambda", "lambda", false)) c.lambda = *l;
  if (auto T = v.number(j, "T", "T", false)) c.T = *T;
  if (!(c.T > 0.0)) v.add("invalid-parameter", "T must be positive");
  parse_domain(j, v, c.x_min, c.x_max);
  if (auto r = v.number(j, "return_tol", "return_tol", false)) c.return_tol = *r;
  if (j.contains("data")) {
    if (auto d = parse_initial_data(j["data"], v, "data")) c.data = *d;
  }
  v.guard([&] {
    check_cfl(c.velocity, c.lambda, CflVariant::Main);
    return GridSpec::make(c.x_min, c.x_max, c.h);
  });
  v.throw_if_failed();
  return c;
}

inline EntropyTableConfig parse_entropy_table(const json& j,
                                              const std::filesystem::path& base_dir) {
  Validator v;
  EntropyTableConfig c;
  if (!j.is_object()) {
    v.add("invalid-type", "config must be a JSON object");
    v.throw_if_failed();
  }
  v.only_keys(j,
              {"epsilons", "h", "kernels", "data", "c", "T", "lambda", "domain", "weights",
               "velocity"},
              "");
  if (auto e = parse_number_list(j, "epsilons", v, false)) c.epsilons = *e;
  for (double e : c.epsilons)
    if (!(e > 0.0)) v.add("invalid-parameter", "epsilons must be positive");
  if (auto h = v.number(j, "h", "h", false)) c.h = *h;
  if (j.contains("kernels")) {
    if (!j["kernels"].is_array()) {
      v.add("invalid-type", "kernels must be an array");
    } else {
      c.kernels.clear();
      for (const auto& k : j["kernels"])
        if (auto kk = parse_kernel(k, v, "kernels[]", base_dir)) c.kernels.push_back(*kk);
    }
  }
  if (j.contains("data")) {
    if (!j["data"].is_array()) {
      v.add("invalid-type", "data must be an array");
    } else {
      c.data.clear();
      for (const auto& d : j["data"])
        if (auto dd = parse_initial_data(d, v, "data[]")) c.data.push_back(*dd);
    }
  }
  if (auto cc = v.number(j, "c", "c", false)) c.c = *cc;
  if (!(c.c >= 0.0 && c.c <= 1.0)) v.add("invalid-parameter", "c must lie in [0, 1]");
  if (auto T = v.number(j, "T", "T", false)) c.T = *T;
  if (!(c.T > 0.0)) v.add("invalid-parameter", "T must be positive");
  if (auto l = v.number(j, "lambda", "lambda", false)) c.lambda = *l;
  parse_domain(j, v, c.x_min, c.x_max);
  if (j.contains("weights")) {
    if (auto f = parse_enum(j["weights"], v, "weights", weight_family_from_name))
      c.weight_family = *f;
  }
  if (j.contains("velocity")) {
    if (auto vm = parse_velocity(j["velocity"], v, "velocity")) c.velocity = *vm;
  }
  v.guard([&] {
    check_cfl(c.velocity, c.lambda, CflVariant::Main);
    return GridSpec::make(c.x_min, c.x_max, c.h);
  });
  v.throw_if_failed();
  return c;
}

inline json report_json(const WeightConditionReport& r, double c_gamma,
                        const QuadratureWeights& q) {
  return {{"nonneg_monotone", r.nonneg_monotone},
          {"normalized", r.normalized},
          {"convex", r.convex},
          {"localized_proxy", r.localized_proxy},
          {"moment_bounded", r.moment_bounded},
          {"measured_moment_ratio", r.measured_moment_ratio},
          {"worst_convexity_defect", r.worst_convexity_defect},
          {"c_gamma", c_gamma},
          {"K", q.last_index()},
          {"sum", q.sum()},
          {"tail_mass", q.tail_mass}};
}

}  // namespace nlcl
