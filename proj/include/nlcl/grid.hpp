#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "nlcl/error.hpp"

namespace nlcl {

/// Uniform grid on [x_min, x_max). Cell j spans [x_min + j h, x_min + (j+1) h).
/// Lookups outside the grid are clamped to the nearest cell (constant
/// extension).
struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  double h = 1.0;
  std::size_t num_cells = 1;

  static GridSpec make(double x_min, double x_max, double h) {
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
      throw ValidationError("invalid-grid", "x_min must be < x_max");
    if (!(h > 0.0) || !std::isfinite(h))
      throw ValidationError("invalid-grid", "h must be positive");
    const double cells = (x_max - x_min) / h;
    const double rounded = std::round(cells);
    if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * rounded)
      throw ValidationError("grid-divisibility",
                            "(x_max - x_min)/h = " + std::to_string(cells) +
                                " is not an integer");
    return GridSpec{x_min, x_max, h, static_cast<std::size_t>(rounded)};
  }

  double cell_left(std::size_t j) const { return x_min + static_cast<double>(j) * h; }
  double cell_right(std::size_t j) const {
    return x_min + static_cast<double>(j + 1) * h;
  }
  double cell_center(std::size_t j) const {
    return x_min + (static_cast<double>(j) + 0.5) * h;
  }
};

/// Half-open index window [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
  bool empty() const noexcept { return end <= begin; }
  static IndexRange full(std::size_t n) { return {0, n}; }
};

}  // namespace nlcl
