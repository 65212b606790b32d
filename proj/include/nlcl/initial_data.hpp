#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlcl/error.hpp"
#include "nlcl/grid.hpp"

namespace nlcl {

/// Initial density rho_0 with values in [0, 1].
struct InitialDataSpec {
  enum class Kind {
    RiemannShock,        // 0.7 on [0, inf)
    RiemannRarefaction,  // 0.65 on (-inf, 0], 0.35 on [0, inf)
    BellShaped,          // 0.4 + 0.4 exp(-100 x^2)
    TvIncrease,          // 0.5 on (-delta, -delta/2) plus 1 on [0, inf)
    Constant,
    PiecewiseConstant,   // values[i] between breakpoints[i-1] and breakpoints[i]
  };

  Kind kind = Kind::Constant;
  double delta = 0.2;
  double value = 0.0;
  std::vector<double> breakpoints;
  std::vector<double> values;

  static InitialDataSpec of(Kind k) {
    InitialDataSpec d;
    d.kind = k;
    return d;
  }

  static InitialDataSpec riemann_shock() { return of(Kind::RiemannShock); }
  static InitialDataSpec riemann_rarefaction() { return of(Kind::RiemannRarefaction); }
  static InitialDataSpec bell_shaped() { return of(Kind::BellShaped); }
  static InitialDataSpec tv_increase(double delta) {
    if (!(delta > 0.0)) throw ValidationError("invalid-parameter", "delta must be > 0");
    InitialDataSpec d = of(Kind::TvIncrease);
    d.delta = delta;
    return d;
  }
  static InitialDataSpec constant(double c) {
    InitialDataSpec d = of(Kind::Constant);
    d.value = c;
    return d;
  }
  static InitialDataSpec piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<double> values) {
    if (values.size() != breakpoints.size() + 1)
      throw ValidationError("invalid-initial-data",
                            "need exactly one more value than breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
      if (!(breakpoints[i] > breakpoints[i - 1]))
        throw ValidationError("invalid-initial-data", "breakpoints must increase");
    InitialDataSpec d = of(Kind::PiecewiseConstant);
    d.breakpoints = std::move(breakpoints);
    d.values = std::move(values);
    return d;
  }

  std::string name() const {
    switch (kind) {
      case Kind::RiemannShock: return "riemann_shock";
      case Kind::RiemannRarefaction: return "riemann_rarefaction";
      case Kind::BellShaped: return "bell_shaped";
      case Kind::TvIncrease: return "tv_increase";
      case Kind::Constant: return "constant";
      case Kind::PiecewiseConstant: return "piecewise_constant";
    }
    return "unknown";
  }

  /// Breakpoints/values for piecewise-constant data, nullopt for smooth data.
  std::optional<std::pair<std::vector<double>, std::vector<double>>> pieces() const {
    using P = std::pair<std::vector<double>, std::vector<double>>;
    switch (kind) {
      case Kind::RiemannShock: return P{{0.0}, {0.0, 0.7}};
      case Kind::RiemannRarefaction: return P{{0.0}, {0.65, 0.35}};
      case Kind::TvIncrease:
        return P{{-delta, -0.5 * delta, 0.0}, {0.0, 0.5, 0.0, 1.0}};
      case Kind::Constant: return P{{}, {value}};
      case Kind::PiecewiseConstant: return P{breakpoints, values};
      case Kind::BellShaped: return std::nullopt;
    }
    return std::nullopt;
  }

  /// (rho_L, rho_R) when the data is a single jump at x = 0.
  std::optional<std::pair<double, double>> riemann_states() const {
    if (kind == Kind::RiemannShock) return std::pair{0.0, 0.7};
    if (kind == Kind::RiemannRarefaction) return std::pair{0.65, 0.35};
    if (kind == Kind::PiecewiseConstant && breakpoints.size() == 1 &&
        breakpoints[0] == 0.0)
      return std::pair{values[0], values[1]};
    return std::nullopt;
  }

  double operator()(double x) const {
    if (kind == Kind::BellShaped) return 0.4 + 0.4 * std::exp(-100.0 * x * x);
    const auto p = *pieces();
    std::size_t i = 0;
    while (i < p.first.size() && x >= p.first[i]) ++i;
    return p.second[i];
  }
};

/// Exact cell averages of rho_0: closed form for piecewise-constant data,
/// 5-point Gauss-Legendre per cell for smooth data.
inline std::vector<double> discretize_initial(const InitialDataSpec& data,
                                              const GridSpec& grid) {
  std::vector<double> out(grid.num_cells);
  const auto pieces = data.pieces();

  static constexpr std::array<double, 5> nodes{
      -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
      0.9061798459386640};
  static constexpr std::array<double, 5> weights{
      0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
      0.2369268850561891};

  for (std::size_t j = 0; j < grid.num_cells; ++j) {
    const double a = grid.cell_left(j);
    const double b = grid.cell_right(j);
    double avg = 0.0;
    if (pieces) {
      const auto& [bp, vals] = *pieces;
      // Index of the piece containing the left end, and of the right end.
      std::size_t ia = 0;
      while (ia < bp.size() && a >= bp[ia]) ++ia;
      std::size_t ib = ia;
      while (ib < bp.size() && b > bp[ib]) ++ib;
      if (ia == ib) {
        avg = vals[ia];
      } else {
        double acc = 0.0;
        double lo = a;
        for (std::size_t i = ia; i <= ib; ++i) {
          const double hi = i < ib ? bp[i] : b;
          acc += vals[i] * (hi - lo);
          lo = hi;
        }
        avg = acc / (b - a);
      }
    } else {
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      double acc = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q)
        acc += weights[q] * data(mid + half * nodes[q]);
      avg = 0.5 * acc;
    }
    if (avg < -1e-12 || avg > 1.0 + 1e-12)
      throw ValidationError("data-out-of-range",
                            "cell " + std::to_string(j) + " average " +
                                std::to_string(avg) + " outside [0, 1]");
    out[j] = avg;
  }
  return out;
}

}  // namespace nlcl
