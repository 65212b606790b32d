#pragma once

// Runtime stability metrics: extrema, mass, spatial and temporal total
// variation, Kruzhkov entropy residuals (local and nonlocal forms), L1 errors
// and the W-rho deviation. All reductions run in ascending j, then n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "nlcl/error.hpp"
#include "nlcl/grid.hpp"
#include "nlcl/quadrature.hpp"
#include "nlcl/velocity.hpp"

namespace nlcl {

struct DiagnosticsRecord {
  std::size_t n = 0;
  double t = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double mass = 0.0;
  double tv_rho = 0.0;
  double tv_W = 0.0;
  double tv_time_increment = 0.0;  // sum_j |W^n - W^{n-1}|, 0 at n = 0
  double entropy_pos_rho = 0.0;    // tau h sum_j max(E^rho_{j,n-1}, 0)
  double entropy_pos_W = 0.0;
};

struct EntropyResidualConfig {
  double c = 0.5;
  /// Empty range means "whole grid".
  IndexRange window{};
};

enum class EntropyTarget { OnRho, OnW };

/// Sum of |u_{j+1} - u_j| for consecutive pairs inside the window.
inline double tv(std::span<const double> u, IndexRange window) {
  if (window.empty()) throw Error("empty-window", "total variation over empty window");
  if (window.end > u.size()) throw Error("window-out-of-range", "");
  double s = 0.0;
  for (std::size_t j = window.begin; j + 1 < window.end; ++j) s += std::abs(u[j + 1] - u[j]);
  return s;
}

inline double tv(std::span<const double> u) { return tv(u, IndexRange::full(u.size())); }

/// Window that drops the cells a boundary can influence by time T: the
/// ceil((R eps + |V| T) / h) cells nearest each end. Empty if nothing is left.
inline IndexRange boundary_safe_window(const GridSpec& grid, double epsilon,
                                       double v_sup, double T, double R = 40.0) {
  const double cut = std::ceil((R * epsilon + v_sup * T) / grid.h);
  if (2.0 * cut >= static_cast<double>(grid.num_cells)) return {0, 0};
  const auto c = static_cast<std::size_t>(cut);
  return {c, grid.num_cells - c};
}

namespace detail {

inline std::size_t clamp_index(std::ptrdiff_t j, std::size_t n) {
  if (j < 0) return 0;
  if (static_cast<std::size_t>(j) >= n) return n - 1;
  return static_cast<std::size_t>(j);
}

inline IndexRange resolve(IndexRange w, std::size_t n) {
  return w.empty() ? IndexRange::full(n) : IndexRange{w.begin, std::min(w.end, n)};
}

}  // namespace detail

/// Local Kruzhkov flux Psi_c(u, w) = (u v c) V(w v c) - (u ^ c) V(w ^ c).
inline double kruzhkov_flux(const VelocityModel& V, double c, double u, double w) {
  return std::max(u, c) * V(std::max(w, c)) - std::min(u, c) * V(std::min(w, c));
}

/// Residuals E_j of the local discrete entropy inequality for one step
/// u^n -> u^{n+1}, over the window (neighbours by constant extension).
inline std::vector<double> entropy_step_residuals(std::span<const double> u_now,
                                                  std::span<const double> u_next,
                                                  const VelocityModel& V, double tau,
                                                  double h, double c, IndexRange window) {
  const std::size_t n = u_now.size();
  window = detail::resolve(window, n);
  std::vector<double> e(window.size());
  for (std::size_t j = window.begin; j < window.end; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const double um = u_now[detail::clamp_index(jj - 1, n)];
    const double u0 = u_now[j];
    const double up = u_now[detail::clamp_index(jj + 1, n)];
    const double dt = (std::abs(u_next[j] - c) - std::abs(u0 - c)) / tau;
    const double dx =
        (kruzhkov_flux(V, c, u0, up) - kruzhkov_flux(V, c, um, u0)) / h;
    e[j - window.begin] = dt + dx;
  }
  return e;
}

/// tau h sum_j max(E_j, 0) for one step.
inline double entropy_step_positive(std::span<const double> u_now,
                                    std::span<const double> u_next,
                                    const VelocityModel& V, double tau, double h,
                                    double c, IndexRange window) {
  double s = 0.0;
  for (double e : entropy_step_residuals(u_now, u_next, V, tau, h, c, window))
    s += std::max(e, 0.0);
  return tau * h * s;
}

struct EntropyResidualResult {
  /// field[n][j - window.begin] = E_{j,n}
  std::vector<std::vector<double>> field;
  double aggregate = 0.0;  // tau h sum max(E, 0)
};

/// Local entropy residuals over a trajectory u^0, u^1, ... of rho or W.
inline EntropyResidualResult entropy_residual_local(
    const std::vector<std::vector<double>>& traj, const VelocityModel& V, double lambda,
    double h, const EntropyResidualConfig& cfg) {
  if (traj.size() < 2) throw Error("short-trajectory", "need at least two time levels");
  const double tau = lambda * h;
  EntropyResidualResult out;
  double total = 0.0;
  for (std::size_t n = 0; n + 1 < traj.size(); ++n) {
    auto e = entropy_step_residuals(traj[n], traj[n + 1], V, tau, h, cfg.c, cfg.window);
    for (double v : e) total += std::max(v, 0.0);
    out.field.push_back(std::move(e));
  }
  out.aggregate = tau * h * total;
  return out;
}

/// Nonlocal flux Psi_{j-1/2} = |W_{j-1} - c| V(c)
///                             - sum_k w_k rho_{j+k-1} |V(W_{j+k}) - V(c)|
/// evaluated for every interface j - 1/2, j = 0..N (index j in the result).
inline std::vector<double> nonlocal_entropy_flux(std::span<const double> rho,
                                                 std::span<const double> W,
                                                 const QuadratureWeights& q,
                                                 const VelocityModel& V, double c) {
  const std::size_t n = rho.size();
  const double vc = V(c);
  const std::size_t K = q.weights.size() - 1;
  std::vector<double> dv(n);
  for (std::size_t i = 0; i < n; ++i) dv[i] = std::abs(V(W[i]) - vc);
  const double tail = q.folds_tail() ? q.tail_mass : 0.0;

  // W at the left ghost cell, built from the ghost density rho_{-1} = rho_0
  // so the flux at the first interface matches the scheme's extension.
  double w_ghost = tail * rho[n - 1];
  for (std::size_t k = 0; k <= K; ++k)
    w_ghost += q.weights[k] * rho[detail::clamp_index(static_cast<std::ptrdiff_t>(k) - 1, n)];

  std::vector<double> psi(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    double s = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      s += q.weights[k] * rho[detail::clamp_index(jj + kk - 1, n)] *
           dv[detail::clamp_index(jj + kk, n)];
    }
    s += tail * rho[n - 1] * dv[n - 1];
    const double w_left = j == 0 ? w_ghost : W[j - 1];
    psi[j] = std::abs(w_left - c) * vc - s;
  }
  return psi;
}

struct NonlocalEntropyResult {
  double aggregate = 0.0;     // tau h sum max(residual, 0)
  double max_residual = 0.0;  // largest pointwise residual (may be negative)
};

/// Residual of the nonlocal discrete entropy inequality for W over one step.
inline NonlocalEntropyResult nonlocal_entropy_step(std::span<const double> rho_now,
                                                   std::span<const double> w_now,
                                                   std::span<const double> w_next,
                                                   const QuadratureWeights& q,
                                                   const VelocityModel& V, double tau,
                                                   double h, double c, IndexRange window) {
  const std::size_t n = rho_now.size();
  window = detail::resolve(window, n);
  const auto psi = nonlocal_entropy_flux(rho_now, w_now, q, V, c);
  NonlocalEntropyResult r;
  r.max_residual = -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t j = window.begin; j < window.end; ++j) {
    const double e = (std::abs(w_next[j] - c) - std::abs(w_now[j] - c)) / tau +
                     (psi[j + 1] - psi[j]) / h;
    r.max_residual = std::max(r.max_residual, e);
    s += std::max(e, 0.0);
  }
  r.aggregate = tau * h * s;
  return r;
}

/// Aggregate of the nonlocal entropy residual over a trajectory of (rho, W)
/// pairs; rho_traj[n] and w_traj[n] belong to time level n.
inline NonlocalEntropyResult nonlocal_entropy_residual_W(
    const std::vector<std::vector<double>>& rho_traj,
    const std::vector<std::vector<double>>& w_traj, const QuadratureWeights& q,
    const VelocityModel& V, double lambda, double h, double c, IndexRange window = {}) {
  if (rho_traj.size() < 2 || w_traj.size() != rho_traj.size())
    throw Error("short-trajectory", "need matching rho/W levels, at least two");
  const double tau = lambda * h;
  NonlocalEntropyResult out;
  out.max_residual = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < rho_traj.size(); ++n) {
    const auto r =
        nonlocal_entropy_step(rho_traj[n], w_traj[n], w_traj[n + 1], q, V, tau, h, c, window);
    out.aggregate += r.aggregate;
    out.max_residual = std::max(out.max_residual, r.max_residual);
  }
  return out;
}

/// Largest residual of the rho entropy inequality that holds for geometric
/// weights, with flux Psi_c(rho, W) = |rho - c| V(W) - c |V(W) - V(c)|.
inline double geometric_rho_entropy_max_residual(std::span<const double> rho_now,
                                                 std::span<const double> w_now,
                                                 std::span<const double> rho_next,
                                                 const VelocityModel& V, double tau,
                                                 double h, double c, IndexRange window) {
  const std::size_t n = rho_now.size();
  window = detail::resolve(window, n);
  const double vc = V(c);
  auto flux = [&](double r, double w) {
    const double vw = V(w);
    return std::abs(r - c) * vw - c * std::abs(vw - vc);
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = window.begin; j < window.end; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const double rm = rho_now[detail::clamp_index(jj - 1, n)];
    const double wp = w_now[detail::clamp_index(jj + 1, n)];
    const double e = (std::abs(rho_next[j] - c) - std::abs(rho_now[j] - c)) / tau +
                     (flux(rho_now[j], wp) - flux(rm, w_now[j])) / h;
    worst = std::max(worst, e);
  }
  return worst;
}

/// h sum_j |u_j - ref_j| over the window; both sides are cell averages.
inline double l1_error(std::span<const double> u, std::span<const double> ref, double h,
                       IndexRange window = {}) {
  if (u.size() != ref.size()) throw Error("size-mismatch", "field vs reference");
  window = detail::resolve(window, u.size());
  double s = 0.0;
  for (std::size_t j = window.begin; j < window.end; ++j) s += std::abs(u[j] - ref[j]);
  return s * h;
}

/// h sum_j |W_j - rho_j|.
inline double w_rho_deviation(std::span<const double> rho, std::span<const double> w,
                              double h) {
  if (rho.size() != w.size()) throw Error("size-mismatch", "rho vs W");
  double s = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) s += std::abs(w[j] - rho[j]);
  return s * h;
}

inline double mass(std::span<const double> rho, double h) {
  double s = 0.0;
  for (double r : rho) s += r;
  return s * h;
}

}  // namespace nlcl
