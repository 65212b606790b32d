#pragma once

// Reference entropy solutions of the local law rho_t + (rho V(rho))_x = 0:
// the local monotone scheme, closed-form Greenshields Riemann solutions, and a
// dispatcher that falls back to a refined local run.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nlcl/error.hpp"
#include "nlcl/grid.hpp"
#include "nlcl/initial_data.hpp"
#include "nlcl/scheme.hpp"
#include "nlcl/velocity.hpp"

namespace nlcl {

inline constexpr std::size_t kDefaultRefine = 8;

/// rho_j + lambda (rho_{j-1} V(rho_j) - rho_j V(rho_{j+1})), constant extension.
/// Shares the update kernel with the nonlocal scheme, so a nonlocal run whose
/// weights reduce to w_0 = 1 reproduces this bit for bit.
inline void local_step(std::span<const double> rho, const VelocityModel& V, double lambda,
                       std::span<double> out) {
  godunov_update(rho, rho, V, lambda, out);
}

inline std::vector<double> local_step(std::span<const double> rho, const VelocityModel& V,
                                      double lambda) {
  std::vector<double> out(rho.size());
  local_step(rho, V, lambda, out);
  return out;
}

/// Local monotone scheme with its maximum-principle CFL checked up front.
class LocalScheme {
public:
  LocalScheme(GridSpec grid, VelocityModel v, double lambda)
      : grid_(grid), v_(v), lambda_(lambda) {
    check_cfl(v_, lambda_, CflVariant::MaxPrinciple);
  }

  const GridSpec& grid() const noexcept { return grid_; }
  double lambda() const noexcept { return lambda_; }

  std::vector<double> step(std::span<const double> rho) const {
    return local_step(rho, v_, lambda_);
  }

  /// Advances `steps` times in place.
  void advance(std::vector<double>& rho, std::size_t steps) const {
    std::vector<double> tmp(rho.size());
    for (std::size_t n = 0; n < steps; ++n) {
      local_step(rho, v_, lambda_, tmp);
      rho.swap(tmp);
    }
  }

private:
  GridSpec grid_;
  VelocityModel v_;
  double lambda_;
};

namespace detail {

inline void check_state(double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw ValidationError("out-of-range-state",
                          "Riemann state " + std::to_string(r) + " outside [0, 1]");
}

}  // namespace detail

/// Entropy solution of the Greenshields Riemann problem, f(r) = r (1 - r).
inline double exact_riemann(double rho_l, double rho_r, double t, double x) {
  detail::check_state(rho_l);
  detail::check_state(rho_r);
  if (t < 0.0) throw ValidationError("invalid-parameter", "t must be >= 0");
  if (rho_l == rho_r) return rho_l;
  if (t == 0.0) return x < 0.0 ? rho_l : rho_r;
  if (rho_l < rho_r) {
    const double s = 1.0 - rho_l - rho_r;
    return x < s * t ? rho_l : rho_r;
  }
  const double xl = (1.0 - 2.0 * rho_l) * t;
  const double xr = (1.0 - 2.0 * rho_r) * t;
  if (x <= xl) return rho_l;
  if (x >= xr) return rho_r;
  return 0.5 * (1.0 - x / t);
}

/// Average of exact_riemann over [a, b], integrated in closed form.
inline double exact_riemann_average(double rho_l, double rho_r, double t, double a,
                                    double b) {
  detail::check_state(rho_l);
  detail::check_state(rho_r);
  if (!(b > a)) throw Error("invalid-interval", "cell must have positive width");
  if (rho_l == rho_r) return rho_l;
  const double len = b - a;
  // Overlap of [a, b] with (-inf, p] and [p, inf).
  auto left_of = [&](double p) { return std::clamp(p, a, b) - a; };
  auto right_of = [&](double p) { return b - std::clamp(p, a, b); };
  if (t == 0.0 || rho_l < rho_r) {
    const double p = t == 0.0 ? 0.0 : (1.0 - rho_l - rho_r) * t;
    return (rho_l * left_of(p) + rho_r * right_of(p)) / len;
  }
  const double xl = (1.0 - 2.0 * rho_l) * t;
  const double xr = (1.0 - 2.0 * rho_r) * t;
  const double lo = std::clamp(xl, a, b);
  const double hi = std::clamp(xr, a, b);
  // integral of (1 - x/t)/2 over [lo, hi]
  const double fan = 0.5 * (hi - lo) - (hi * hi - lo * lo) / (4.0 * t);
  return (rho_l * left_of(xl) + fan + rho_r * right_of(xr)) / len;
}

struct ReferenceSolution {
  enum class Kind { ExactRiemann, FineMesh };

  Kind kind = Kind::ExactRiemann;
  InitialDataSpec data;
  VelocityModel velocity;
  GridSpec grid;
  double lambda = 0.25;
  // provenance
  double rho_l = 0.0;
  double rho_r = 0.0;
  std::size_t refine = kDefaultRefine;
  double h_ref = 0.0;

  std::string kind_name() const {
    return kind == Kind::ExactRiemann ? "exact_riemann" : "fine_mesh";
  }

  /// Cell averages of the reference on `grid` at time t. The fine mesh is
  /// advanced floor(t / tau_ref) steps, the multiple of tau_ref at or before t.
  std::vector<double> cell_averages(double t) const {
    std::vector<double> out(grid.num_cells);
    if (kind == Kind::ExactRiemann) {
      for (std::size_t j = 0; j < grid.num_cells; ++j)
        out[j] = exact_riemann_average(rho_l, rho_r, t, grid.cell_left(j), grid.cell_right(j));
      return out;
    }
    const GridSpec fine{grid.x_min, grid.x_max, h_ref, grid.num_cells * refine};
    std::vector<double> rho = discretize_initial(data, fine);
    LocalScheme ls(fine, velocity, lambda);
    ls.advance(rho, steps_for(t, lambda * h_ref));
    for (std::size_t j = 0; j < grid.num_cells; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < refine; ++i) s += rho[j * refine + i];
      out[j] = s / static_cast<double>(refine);
    }
    return out;
  }
};

/// Exact solution for Riemann data under the Greenshields flux (the clipped
/// variant agrees with it on [0, 1]); otherwise a local run on h / refine with
/// the same lambda, block-averaged onto `grid`.
inline ReferenceSolution reference_solution(const InitialDataSpec& data,
                                            const VelocityModel& velocity,
                                            const GridSpec& grid,
                                            std::size_t refine = kDefaultRefine,
                                            double lambda = 0.25) {
  if (refine < 2) throw ValidationError("invalid-parameter", "refine must be >= 2");
  ReferenceSolution r;
  r.data = data;
  r.velocity = velocity;
  r.grid = grid;
  r.lambda = lambda;
  r.refine = refine;
  const bool greenshields_flux = velocity.family == VelocityFamily::Greenshields ||
                                 velocity.family == VelocityFamily::ClippedGreenshields;
  const auto states = data.riemann_states();
  if (states && greenshields_flux) {
    r.kind = ReferenceSolution::Kind::ExactRiemann;
    r.rho_l = states->first;
    r.rho_r = states->second;
    detail::check_state(r.rho_l);
    detail::check_state(r.rho_r);
    r.refine = 0;
  } else {
    r.kind = ReferenceSolution::Kind::FineMesh;
    r.h_ref = grid.h / static_cast<double>(refine);
    check_cfl(velocity, lambda, CflVariant::MaxPrinciple);
  }
  return r;
}

}  // namespace nlcl
