#pragma once

// Godunov-type scheme for rho_t + (rho V(W))_x = 0 with the nonlocal impact
//   W_j = sum_k w_k rho_{j+k},
//   rho_j^{n+1} = rho_j^n + lambda (rho_{j-1}^n V(W_j^n) - rho_j^n V(W_{j+1}^n)),
// on a finite grid with constant extension at both ends.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlcl/diagnostics.hpp"
#include "nlcl/error.hpp"
#include "nlcl/grid.hpp"
#include "nlcl/quadrature.hpp"
#include "nlcl/velocity.hpp"

namespace nlcl {

enum class CflVariant { Main, MaxPrinciple, Unchecked };

inline std::string_view to_string(CflVariant v) {
  switch (v) {
    case CflVariant::Main: return "main";
    case CflVariant::MaxPrinciple: return "max_principle";
    case CflVariant::Unchecked: return "unchecked";
  }
  return "unknown";
}

inline CflVariant cfl_variant_from_name(std::string_view name) {
  if (name == "main") return CflVariant::Main;
  if (name == "max_principle") return CflVariant::MaxPrinciple;
  if (name == "unchecked") return CflVariant::Unchecked;
  throw ValidationError("unknown-cfl-variant", std::string(name));
}

/// Largest admissible lambda: 1/(|V| + 2|V'|) for the main condition (TVD of W),
/// 1/(|V| + |V'|) for the maximum principle. Unchecked has no bound.
inline double max_cfl_ratio(const VelocityModel& v, CflVariant variant) {
  switch (variant) {
    case CflVariant::Main: return 1.0 / (v.sup_norm + 2.0 * v.lip_norm);
    case CflVariant::MaxPrinciple: return 1.0 / (v.sup_norm + v.lip_norm);
    case CflVariant::Unchecked: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

inline void check_cfl(const VelocityModel& v, double lambda, CflVariant variant) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ValidationError("invalid-parameter", "lambda must be positive");
  const double bound = max_cfl_ratio(v, variant);
  // Relative slack so that lambda = 1/3 passes the main condition exactly.
  if (lambda > bound * (1.0 + 1e-12))
    throw ValidationError("cfl-violation",
                          "lambda=" + std::to_string(lambda) + " exceeds " +
                              std::to_string(bound) + " (" +
                              std::string(to_string(variant)) + ")");
}

struct SchemeConfig {
  GridSpec grid;
  QuadratureWeights weights;
  VelocityModel velocity;
  double lambda = 0.25;
  double epsilon = 1.0;
  CflVariant cfl_variant = CflVariant::Main;

  double tau() const noexcept { return lambda * grid.h; }
};

struct SolutionField {
  std::size_t n = 0;
  double t = 0.0;
  std::vector<double> rho;
  std::vector<double> w;
};

/// W_j = sum_{k=0}^{K} w_k rho_{min(j+k, N-1)} (+ tail * rho_{N-1} when the
/// family folds its tail). Every W_j accumulates in ascending k; the loop runs
/// over k outermost so the inner loop over j vectorizes without reordering
/// any individual sum.
inline void compute_W(std::span<const double> rho, const QuadratureWeights& q,
                      std::span<double> out) {
  const std::size_t n = rho.size();
  const std::size_t K = q.weights.size() - 1;
  const double last = rho[n - 1];
  std::fill(out.begin(), out.end(), 0.0);
  double* o = out.data();
  const double* r = rho.data();
  for (std::size_t k = 0; k <= K; ++k) {
    const double wk = q.weights[k];
    const std::size_t inside = k < n ? n - k : 0;  // j with j + k <= n - 1
    for (std::size_t j = 0; j < inside; ++j) o[j] += wk * r[j + k];
    const double contrib = wk * last;
    for (std::size_t j = inside; j < n; ++j) o[j] += contrib;
  }
  if (q.folds_tail() && q.tail_mass != 0.0) {
    const double contrib = q.tail_mass * last;
    for (std::size_t j = 0; j < n; ++j) o[j] += contrib;
  }
}

inline std::vector<double> compute_W(std::span<const double> rho,
                                     const QuadratureWeights& q) {
  std::vector<double> w(rho.size());
  compute_W(rho, q, w);
  return w;
}

/// One upwind update given rho^n and the matching W^n.
inline void godunov_update(std::span<const double> rho, std::span<const double> W,
                           const VelocityModel& V, double lambda, std::span<double> out) {
  const std::size_t n = rho.size();
  // vw[j] = V(W_j); the entry past the end is the constant extension.
  std::vector<double> vw(n + 1);
  for (std::size_t j = 0; j < n; ++j) vw[j] = V(W[j]);
  vw[n] = vw[n - 1];
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j == 0 ? rho[0] : rho[j - 1];
    out[j] = rho[j] + lambda * (left * vw[j] - rho[j] * vw[j + 1]);
  }
}

struct RunOptions {
  bool record_diagnostics = true;
  EntropyResidualConfig entropy{};
  /// Window for the TV quantities; empty = whole grid.
  IndexRange tv_window{};
  /// Called after every step with (field at n, field at n+1).
  std::function<void(const SolutionField&, const SolutionField&)> on_step;
};

struct RunResult {
  std::vector<SolutionField> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;
  SolutionField final_field;
  std::size_t num_steps = 0;
  double final_time = 0.0;
  double wall_time_s = 0.0;
};

/// Number of steps of size tau that fit in T (round-off tolerant floor).
inline std::size_t steps_for(double T, double tau) {
  return static_cast<std::size_t>(std::floor(T / tau + 1e-9));
}

class Scheme {
public:
  /// Validates the configuration; the CFL condition is only checked here.
  explicit Scheme(SchemeConfig config) : config_(std::move(config)) {
    if (!(config_.epsilon > 0.0))
      throw ValidationError("invalid-parameter", "epsilon must be positive");
    if (config_.weights.weights.empty())
      throw ValidationError("invalid-parameter", "empty weight sequence");
    check_cfl(config_.velocity, config_.lambda, config_.cfl_variant);
  }

  const SchemeConfig& config() const noexcept { return config_; }

  SolutionField initial_field(std::vector<double> rho0) const {
    if (rho0.size() != config_.grid.num_cells)
      throw ValidationError("size-mismatch", "initial data length != num_cells");
    SolutionField f;
    f.rho = std::move(rho0);
    f.w = compute_W(f.rho, config_.weights);
    return f;
  }

  /// Advances one step. A field whose w is missing gets W recomputed first.
  SolutionField step(const SolutionField& field) const {
    if (field.w.size() != field.rho.size()) {
      SolutionField fixed = field;
      fixed.w = compute_W(fixed.rho, config_.weights);
      return step(fixed);
    }
    SolutionField next;
    next.n = field.n + 1;
    next.t = static_cast<double>(next.n) * config_.tau();
    next.rho.resize(field.rho.size());
    next.w.resize(field.rho.size());
    step_into(field, next);
    return next;
  }

  /// Advances `steps` times; `snapshot_times` are aligned to the last step at
  /// or before each requested time.
  RunResult run(std::vector<double> initial, double T,
                const std::vector<double>& snapshot_times = {},
                const RunOptions& opts = {}) const {
    if (!(T > 0.0)) throw ValidationError("invalid-parameter", "T must be positive");
    const auto start = std::chrono::steady_clock::now();
    const double tau = config_.tau();
    const std::size_t N = steps_for(T, tau);

    std::vector<std::size_t> snap_steps;
    for (double ts : snapshot_times)
      snap_steps.push_back(std::min(N, steps_for(std::max(ts, 0.0), tau)));

    RunResult res;
    SolutionField cur = initial_field(std::move(initial));
    SolutionField nxt = cur;

    auto take_snapshots = [&](const SolutionField& f) {
      for (std::size_t s : snap_steps)
        if (s == f.n) res.snapshots.push_back(f);
    };

    if (opts.record_diagnostics) res.diagnostics.push_back(record(cur, nullptr, opts));
    take_snapshots(cur);

    for (std::size_t n = 0; n < N; ++n) {
      nxt.n = cur.n + 1;
      nxt.t = static_cast<double>(nxt.n) * tau;
      step_into(cur, nxt);
      if (opts.on_step) opts.on_step(cur, nxt);
      if (opts.record_diagnostics) res.diagnostics.push_back(record(nxt, &cur, opts));
      take_snapshots(nxt);
      std::swap(cur, nxt);
    }

    res.num_steps = N;
    res.final_time = static_cast<double>(N) * tau;
    res.final_field = std::move(cur);
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }

private:
  void step_into(const SolutionField& field, SolutionField& next) const {
    godunov_update(field.rho, field.w, config_.velocity, config_.lambda, next.rho);
    compute_W(next.rho, config_.weights, next.w);
  }

  DiagnosticsRecord record(const SolutionField& f, const SolutionField* prev,
                           const RunOptions& opts) const {
    const double h = config_.grid.h;
    DiagnosticsRecord d;
    d.n = f.n;
    d.t = f.t;
    const auto [mn, mx] = std::minmax_element(f.rho.begin(), f.rho.end());
    d.rho_min = *mn;
    d.rho_max = *mx;
    d.mass = mass(f.rho, h);
    const IndexRange tvw = detail::resolve(opts.tv_window, f.rho.size());
    d.tv_rho = tv(f.rho, tvw);
    d.tv_W = tv(f.w, tvw);
    if (prev) {
      double inc = 0.0;
      for (std::size_t j = tvw.begin; j < tvw.end; ++j) inc += std::abs(f.w[j] - prev->w[j]);
      d.tv_time_increment = inc;
      const double tau = config_.tau();
      d.entropy_pos_rho = entropy_step_positive(prev->rho, f.rho, config_.velocity, tau, h,
                                                opts.entropy.c, opts.entropy.window);
      d.entropy_pos_W = entropy_step_positive(prev->w, f.w, config_.velocity, tau, h,
                                              opts.entropy.c, opts.entropy.window);
    }
    return d;
  }

  SchemeConfig config_;
};

}  // namespace nlcl
