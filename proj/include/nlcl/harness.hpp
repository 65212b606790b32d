#pragma once

// Experiment drivers: convergence sweeps along limiting paths eps(h),
// quadrature-family comparisons, the TV-increase study, the entropy table, and
// log-log rate fitting. Sweep cells are independent and run on a small thread
// pool; results are always returned in input order.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nlcl/diagnostics.hpp"
#include "nlcl/error.hpp"
#include "nlcl/grid.hpp"
#include "nlcl/initial_data.hpp"
#include "nlcl/kernels.hpp"
#include "nlcl/quadrature.hpp"
#include "nlcl/reference.hpp"
#include "nlcl/scheme.hpp"
#include "nlcl/velocity.hpp"

namespace nlcl {

enum class LimitPath { EpsEqualsH, EpsEquals5H, EpsEqualsSqrtH, FixedEps };
enum class TargetField { W, Rho };

inline std::string_view to_string(LimitPath p) {
  switch (p) {
    case LimitPath::EpsEqualsH: return "eps_equals_h";
    case LimitPath::EpsEquals5H: return "eps_equals_5h";
    case LimitPath::EpsEqualsSqrtH: return "eps_equals_sqrt_h";
    case LimitPath::FixedEps: return "fixed_eps";
  }
  return "unknown";
}

inline LimitPath limit_path_from_name(std::string_view s) {
  if (s == "eps_equals_h") return LimitPath::EpsEqualsH;
  if (s == "eps_equals_5h") return LimitPath::EpsEquals5H;
  if (s == "eps_equals_sqrt_h") return LimitPath::EpsEqualsSqrtH;
  if (s == "fixed_eps") return LimitPath::FixedEps;
  throw ValidationError("unknown-path", std::string(s));
}

inline std::string_view to_string(TargetField t) { return t == TargetField::W ? "W" : "rho"; }

inline TargetField target_from_name(std::string_view s) {
  if (s == "W" || s == "w") return TargetField::W;
  if (s == "rho") return TargetField::Rho;
  throw ValidationError("unknown-target", std::string(s));
}

inline const std::vector<double>& default_h_list() {
  static const std::vector<double> hs{4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4};
  return hs;
}

struct StudySpec {
  InitialDataSpec data = InitialDataSpec::riemann_shock();
  Kernel kernel = Kernel::linear();
  WeightFamily weight_family = WeightFamily::Exact;
  VelocityModel velocity = VelocityModel::greenshields();
  LimitPath path = LimitPath::EpsEqualsH;
  double fixed_eps = 0.0;  // used by FixedEps
  std::vector<double> h_list = default_h_list();
  double lambda = 0.25;
  CflVariant cfl_variant = CflVariant::Main;
  double T = 1.0;
  double x_min = -2.0;
  double x_max = 2.0;
  TargetField target = TargetField::W;
  std::size_t refine = kDefaultRefine;
  std::size_t fit_points = 0;  // 0 = all rows
  double tail_tol = kDefaultTailTol;

  double epsilon_for(double h) const {
    switch (path) {
      case LimitPath::EpsEqualsH: return h;
      case LimitPath::EpsEquals5H: return 5.0 * h;
      case LimitPath::EpsEqualsSqrtH: return std::sqrt(h);
      case LimitPath::FixedEps: return fixed_eps;
    }
    return h;
  }

  /// Throws ValidationError listing the first problem found.
  void validate() const {
    if (h_list.empty()) throw ValidationError("invalid-study", "h_list is empty");
    for (std::size_t i = 0; i < h_list.size(); ++i) {
      if (!(h_list[i] > 0.0)) throw ValidationError("invalid-study", "h must be positive");
      if (i > 0 && !(h_list[i] < h_list[i - 1]))
        throw ValidationError("invalid-study", "h_list must be strictly decreasing");
    }
    if (path == LimitPath::FixedEps && !(fixed_eps > 0.0))
      throw ValidationError("invalid-study", "fixed eps must be positive");
    if (!(T > 0.0)) throw ValidationError("invalid-study", "T must be positive");
    check_cfl(velocity, lambda, cfl_variant);
    for (double h : h_list) (void)GridSpec::make(x_min, x_max, h);
  }
};

struct StudyRow {
  double h = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  double l1_error = 0.0;
  double wall_time_s = 0.0;
  std::size_t num_steps = 0;
  double final_time = 0.0;
  std::string reference_kind;
};

struct StudyResult {
  StudySpec spec;
  std::vector<StudyRow> rows;
  double slope = 0.0;
  std::size_t fit_points = 0;
};

/// Least-squares slope of log e against log h over the last `fit_points`
/// points (0 = all). Errors proportional to h give slope 1.
inline double fit_rate(const std::vector<std::pair<double, double>>& points,
                       std::size_t fit_points = 0) {
  if (points.size() < 2) throw ValidationError("too-few-points", "need at least 2 points");
  const std::size_t m = fit_points == 0 ? points.size() : std::min(fit_points, points.size());
  if (m < 2) throw ValidationError("too-few-points", "fit window below 2 points");
  double sx = 0.0, sy = 0.0;
  const std::size_t first = points.size() - m;
  for (std::size_t i = first; i < points.size(); ++i) {
    const auto [h, e] = points[i];
    if (!(e > 0.0) || !(h > 0.0))
      throw ValidationError("nonpositive-error", "log-log fit needs positive values");
    sx += std::log(h);
    sy += std::log(e);
  }
  const double mx = sx / static_cast<double>(m);
  const double my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < points.size(); ++i) {
    const double dx = std::log(points[i].first) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(points[i].second) - my);
  }
  if (sxx == 0.0) throw ValidationError("degenerate-fit", "all h values coincide");
  return sxy / sxx;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
/// The first exception thrown by any task is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace detail {

inline std::string cell_tag(double h, double eps) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " (h=%.17g, eps=%.17g)", h, eps);
  return buf;
}

}  // namespace detail

/// One sweep cell: run the scheme at mesh size h and measure the L1 error of
/// the target field against the local entropy solution at the final time.
inline StudyRow run_study_cell(const StudySpec& spec, double h) {
  const double eps = spec.epsilon_for(h);
  try {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec grid = GridSpec::make(spec.x_min, spec.x_max, h);
    SchemeConfig cfg{grid,
                     make_weights(spec.weight_family, spec.kernel, eps, h, spec.tail_tol),
                     spec.velocity,
                     spec.lambda,
                     eps,
                     spec.cfl_variant};
    const Scheme scheme(cfg);
    RunOptions opts;
    opts.record_diagnostics = false;
    const RunResult res = scheme.run(discretize_initial(spec.data, grid), spec.T, {}, opts);
    const ReferenceSolution ref =
        reference_solution(spec.data, spec.velocity, grid, spec.refine, spec.lambda);
    const std::vector<double> ref_avg = ref.cell_averages(res.final_time);
    const auto& field =
        spec.target == TargetField::W ? res.final_field.w : res.final_field.rho;

    StudyRow row;
    row.h = h;
    row.epsilon = eps;
    row.tau = cfg.tau();
    row.l1_error = l1_error(field, ref_avg, h);
    row.num_steps = res.num_steps;
    row.final_time = res.final_time;
    row.reference_kind = ref.kind_name();
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
  } catch (const ValidationError& e) {
    throw ValidationError(e.code(), e.detail() + detail::cell_tag(h, eps));
  } catch (const Error& e) {
    throw Error(e.code(), e.detail() + detail::cell_tag(h, eps));
  }
}

inline StudyResult run_convergence_study(const StudySpec& spec, std::size_t threads = 0) {
  spec.validate();
  StudyResult out;
  out.spec = spec;
  out.rows.resize(spec.h_list.size());
  parallel_for(spec.h_list.size(), threads,
               [&](std::size_t i) { out.rows[i] = run_study_cell(spec, spec.h_list[i]); });
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : out.rows) pts.emplace_back(r.h, r.l1_error);
  out.fit_points = spec.fit_points == 0 ? pts.size() : std::min(spec.fit_points, pts.size());
  out.slope = fit_rate(pts, out.fit_points);
  return out;
}

/// One study per family, all other settings taken from `spec`.
inline std::vector<StudyResult> run_quadrature_comparison(
    const StudySpec& spec, const std::vector<WeightFamily>& families,
    std::size_t threads = 0) {
  std::vector<StudyResult> out;
  for (WeightFamily f : families) {
    if (f == WeightFamily::Geometric)
      throw ValidationError("invalid-study", "comparison families are exact/riemann/normalized_riemann");
    StudySpec s = spec;
    s.weight_family = f;
    out.push_back(run_convergence_study(s, threads));
  }
  return out;
}

/// K_i = e_i / ((eps + h + sqrt(eps T) + sqrt(h T)) TV(rho0)) for every row.
inline std::vector<double> kuznetsov_constants(const StudyResult& r, double tv0) {
  std::vector<double> k;
  const double T = r.spec.T;
  for (const auto& row : r.rows) {
    const double env = row.epsilon + row.h + std::sqrt(row.epsilon * T) + std::sqrt(row.h * T);
    k.push_back(row.l1_error / (env * tv0));
  }
  return k;
}

// ---------------------------------------------------------------------------

struct TvStudyConfig {
  std::vector<double> epsilons{0.2};
  double h = 2e-3;
  Kernel kernel = Kernel::exponential();
  WeightFamily weight_family = WeightFamily::Exact;
  VelocityModel velocity = VelocityModel::greenshields();
  double lambda = 0.25;
  double T = 1.6;
  // The left edge sits 20 eps = 4 away from the datum for eps = 0.2 so that
  // the exponential kernel's reach into the boundary stays below 1e-12 in TV.
  double x_min = -4.0;
  double x_max = 2.5;
  double return_tol = 0.05;  // "back near 1" means tv_rho < 1 + return_tol
  std::optional<InitialDataSpec> data;  // default: TV-increase datum with delta = eps
};

struct TvSeries {
  double epsilon = 0.0;
  std::vector<double> t;
  std::vector<double> tv_rho;
  std::vector<double> tv_W;
  std::optional<double> first_exceed_time;  // tv_rho > tv_rho(0)
  std::optional<double> return_time;        // first time after that with tv_rho < 1 + tol
  double max_tv_W_increase = 0.0;           // max_n (tv_W^{n+1} - tv_W^n), may be negative
  double wall_time_s = 0.0;
};

inline TvSeries run_tv_cell(const TvStudyConfig& cfg, double eps) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec grid = GridSpec::make(cfg.x_min, cfg.x_max, cfg.h);
  SchemeConfig sc{grid, make_weights(cfg.weight_family, cfg.kernel, eps, cfg.h),
                  cfg.velocity, cfg.lambda, eps, CflVariant::Main};
  const Scheme scheme(sc);
  const InitialDataSpec data = cfg.data ? *cfg.data : InitialDataSpec::tv_increase(eps);

  TvSeries s;
  s.epsilon = eps;
  RunOptions opts;
  opts.record_diagnostics = false;
  auto push = [&](const SolutionField& f) {
    s.t.push_back(f.t);
    s.tv_rho.push_back(tv(f.rho));
    s.tv_W.push_back(tv(f.w));
  };
  opts.on_step = [&](const SolutionField& prev, const SolutionField& next) {
    if (s.t.empty()) push(prev);
    push(next);
  };
  const auto res = scheme.run(discretize_initial(data, grid), cfg.T, {}, opts);
  if (s.t.empty()) push(scheme.initial_field(discretize_initial(data, grid)));

  const double tv0 = s.tv_rho.front();
  s.max_tv_W_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < s.t.size(); ++n) {
    if (!s.first_exceed_time && s.tv_rho[n] > tv0) s.first_exceed_time = s.t[n];
    if (s.first_exceed_time && !s.return_time && s.tv_rho[n] < 1.0 + cfg.return_tol)
      s.return_time = s.t[n];
    if (n > 0) s.max_tv_W_increase = std::max(s.max_tv_W_increase, s.tv_W[n] - s.tv_W[n - 1]);
  }
  if (s.t.size() < 2) s.max_tv_W_increase = 0.0;
  (void)res;
  s.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

inline std::vector<TvSeries> run_tv_study(const TvStudyConfig& cfg, std::size_t threads = 0) {
  std::vector<TvSeries> out(cfg.epsilons.size());
  parallel_for(cfg.epsilons.size(), threads,
               [&](std::size_t i) { out[i] = run_tv_cell(cfg, cfg.epsilons[i]); });
  return out;
}

// ---------------------------------------------------------------------------

struct EntropyTableConfig {
  std::vector<double> epsilons{2e-1, 2e-2, 2e-3};
  double h = 2e-3;
  std::vector<Kernel> kernels{Kernel::exponential(), Kernel::linear(), Kernel::constant()};
  std::vector<InitialDataSpec> data{InitialDataSpec::riemann_shock(),
                                    InitialDataSpec::riemann_rarefaction(),
                                    InitialDataSpec::bell_shaped()};
  double c = 0.5;
  double T = 1.0;
  double lambda = 0.25;
  double x_min = -2.0;
  double x_max = 2.0;
  WeightFamily weight_family = WeightFamily::Exact;
  VelocityModel velocity = VelocityModel::greenshields();
  IndexRange window{};  // empty = whole grid
};

struct EntropyCell {
  double epsilon = 0.0;
  std::string kernel;
  std::string data;
  double e_rho = 0.0;
  double e_W = 0.0;
  double wall_time_s = 0.0;
};

struct EntropyTable {
  EntropyTableConfig config;
  /// cells[(ie * kernels + ik) * data + id]
  std::vector<EntropyCell> cells;

  const EntropyCell& at(std::size_t ie, std::size_t ik, std::size_t id) const {
    return cells[(ie * config.kernels.size() + ik) * config.data.size() + id];
  }
};

inline EntropyCell run_entropy_cell(const EntropyTableConfig& cfg, double eps,
                                    const Kernel& kernel, const InitialDataSpec& data) {
  if (!(cfg.c >= 0.0 && cfg.c <= 1.0))
    throw ValidationError("invalid-parameter", "c must lie in [0, 1]");
  const auto start = std::chrono::steady_clock::now();
  const GridSpec grid = GridSpec::make(cfg.x_min, cfg.x_max, cfg.h);
  SchemeConfig sc{grid, make_weights(cfg.weight_family, kernel, eps, cfg.h), cfg.velocity,
                  cfg.lambda, eps, CflVariant::Main};
  const Scheme scheme(sc);
  const double tau = sc.tau();
  double sum_rho = 0.0;
  double sum_w = 0.0;
  RunOptions opts;
  opts.record_diagnostics = false;
  opts.on_step = [&](const SolutionField& prev, const SolutionField& next) {
    sum_rho += entropy_step_positive(prev.rho, next.rho, cfg.velocity, tau, cfg.h, cfg.c,
                                     cfg.window);
    sum_w += entropy_step_positive(prev.w, next.w, cfg.velocity, tau, cfg.h, cfg.c,
                                   cfg.window);
  };
  scheme.run(discretize_initial(data, grid), cfg.T, {}, opts);
  EntropyCell cell;
  cell.epsilon = eps;
  cell.kernel = std::string(to_string(kernel.family()));
  cell.data = data.name();
  cell.e_rho = sum_rho;
  cell.e_W = sum_w;
  cell.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

inline EntropyTable run_entropy_table(const EntropyTableConfig& cfg, std::size_t threads = 0) {
  EntropyTable t;
  t.config = cfg;
  const std::size_t nk = cfg.kernels.size();
  const std::size_t nd = cfg.data.size();
  t.cells.resize(cfg.epsilons.size() * nk * nd);
  parallel_for(t.cells.size(), threads, [&](std::size_t i) {
    const std::size_t id = i % nd;
    const std::size_t ik = (i / nd) % nk;
    const std::size_t ie = i / (nd * nk);
    t.cells[i] = run_entropy_cell(cfg, cfg.epsilons[ie], cfg.kernels[ik], cfg.data[id]);
  });
  return t;
}

}  // namespace nlcl
