#pragma once

// Nonlocal kernels gamma(z) supported on (-inf, 0] together with their exact
// calculus: point values, interval masses, first moments and admissibility.

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlcl/error.hpp"

namespace nlcl {

enum class KernelFamily { Exponential, Linear, Constant, CustomTable };

inline std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::Linear: return "linear";
    case KernelFamily::Constant: return "constant";
    case KernelFamily::CustomTable: return "custom";
  }
  return "unknown";
}

/// One piece of a piecewise-constant kernel: value on (z_left, z_right].
struct KernelTableRow {
  double z_left;
  double z_right;
  double value;
};

struct AdmissibilityReport {
  bool supported_in_nonpositive = false;
  bool nonnegative = false;
  bool nondecreasing = false;
  bool convex = false;
  bool normalized = false;

  bool all() const {
    return supported_in_nonpositive && nonnegative && nondecreasing && convex &&
           normalized;
  }
};

/// Immutable kernel description. Built-in families use closed forms:
///   exponential  gamma(z) = e^z            on (-inf, 0]
///   linear       gamma(z) = 2 (z + 1)      on (-1, 0]
///   constant     gamma(z) = 1              on (-1, 0]
/// Custom kernels are piecewise constant tables over a contiguous
/// subinterval of (-inf, 0].
class Kernel {
public:
  static Kernel exponential() {
    Kernel k(KernelFamily::Exponential);
    k.support_left_ = -std::numeric_limits<double>::infinity();
    k.convex_ = true;
    k.nondecreasing_ = true;
    k.total_mass_ = 1.0;
    k.first_moment_ = 1.0;
    return k;
  }

  static Kernel linear() {
    Kernel k(KernelFamily::Linear);
    k.support_left_ = -1.0;
    k.convex_ = true;
    k.nondecreasing_ = true;
    k.total_mass_ = 1.0;
    k.first_moment_ = 1.0 / 3.0;
    return k;
  }

  static Kernel constant() {
    Kernel k(KernelFamily::Constant);
    k.support_left_ = -1.0;
    // The jump from 0 up to the plateau at z = -1 breaks convexity on (-inf, 0].
    k.convex_ = false;
    k.nondecreasing_ = true;
    k.total_mass_ = 1.0;
    k.first_moment_ = 0.5;
    return k;
  }

  /// Builds a table kernel. Rows must be contiguous, ordered and lie in
  /// (-inf, 0]. A declared first moment of +inf marks a kernel whose moment
  /// is unbounded (the table being a truncated representation).
  static Kernel custom(std::vector<KernelTableRow> rows,
                       std::optional<double> declared_first_moment = {}) {
    if (rows.empty()) throw ValidationError("kernel-table", "no rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (!std::isfinite(r.z_left) || !std::isfinite(r.z_right) ||
          !std::isfinite(r.value))
        throw ValidationError("kernel-table",
                              "row " + std::to_string(i) + ": non-finite entry");
      if (!(r.z_left < r.z_right))
        throw ValidationError("kernel-table",
                              "row " + std::to_string(i) + ": z_left >= z_right");
      if (r.z_right > 0.0)
        throw ValidationError("kernel-table",
                              "row " + std::to_string(i) + ": z_right > 0");
      if (i > 0 && std::abs(r.z_left - rows[i - 1].z_right) > 1e-12)
        throw ValidationError("kernel-table",
                              "row " + std::to_string(i) + ": rows not contiguous");
    }

    Kernel k(KernelFamily::CustomTable);
    k.support_left_ = rows.front().z_left;

    double mass = 0.0;
    double moment = 0.0;
    bool nonneg = true;
    for (const auto& r : rows) {
      mass += r.value * (r.z_right - r.z_left);
      moment += r.value * 0.5 * (r.z_left * r.z_left - r.z_right * r.z_right);
      nonneg = nonneg && r.value >= 0.0;
    }
    k.total_mass_ = mass;
    k.first_moment_ = declared_first_moment.value_or(moment);
    k.nonnegative_ = nonneg;

    // Breakpoint samples: 0 at the (open) left end, then the value reached on
    // each piece, then 0 again if the table stops short of z = 0.
    std::vector<double> bz{rows.front().z_left};
    std::vector<double> bv{0.0};
    for (const auto& r : rows) {
      bz.push_back(r.z_right);
      bv.push_back(r.value);
    }
    if (rows.back().z_right < 0.0) {
      bz.push_back(0.0);
      bv.push_back(0.0);
    }
    bool mono = true;
    for (std::size_t i = 1; i < bv.size(); ++i) mono = mono && bv[i] >= bv[i - 1];
    bool convex = true;
    for (std::size_t i = 1; i + 1 < bv.size(); ++i) {
      const double left = (bv[i] - bv[i - 1]) / (bz[i] - bz[i - 1]);
      const double right = (bv[i + 1] - bv[i]) / (bz[i + 1] - bz[i]);
      convex = convex && right - left >= -1e-12;
    }
    k.nondecreasing_ = mono;
    k.convex_ = convex && mono;
    k.table_ = std::move(rows);
    return k;
  }

  KernelFamily family() const noexcept { return family_; }
  double support_left() const noexcept { return support_left_; }
  bool convex_on_support() const noexcept { return convex_; }
  bool nondecreasing_on_support() const noexcept { return nondecreasing_; }
  bool nonnegative() const noexcept { return nonnegative_; }
  double total_mass() const noexcept { return total_mass_; }
  const std::vector<KernelTableRow>& table() const noexcept { return table_; }
  bool compact() const noexcept { return std::isfinite(support_left_); }

  /// Point value. Supports are left-open, so gamma(-1) = 0 for the linear and
  /// constant kernels; gamma(0) is the left limit.
  double evaluate(double z) const {
    if (z > 0.0) return 0.0;
    switch (family_) {
      case KernelFamily::Exponential: return std::exp(z);
      case KernelFamily::Linear: return z > -1.0 ? 2.0 * (z + 1.0) : 0.0;
      case KernelFamily::Constant: return z > -1.0 ? 1.0 : 0.0;
      case KernelFamily::CustomTable:
        for (const auto& r : table_)
          if (z > r.z_left && z <= r.z_right) return r.value;
        return 0.0;
    }
    return 0.0;
  }

  /// Exact integral of gamma over [a, b].
  double interval_mass(double a, double b) const {
    if (a > b)
      throw Error("invalid-interval", "a=" + std::to_string(a) +
                                          " > b=" + std::to_string(b));
    switch (family_) {
      case KernelFamily::Exponential: {
        const double hi = std::min(b, 0.0);
        const double lo = std::min(a, 0.0);
        if (hi <= lo) return 0.0;
        // e^hi - e^lo written to avoid cancellation for short intervals.
        return -std::exp(hi) * std::expm1(lo - hi);
      }
      case KernelFamily::Linear: {
        const double hi = std::clamp(b, -1.0, 0.0);
        const double lo = std::clamp(a, -1.0, 0.0);
        // (hi+1)^2 - (lo+1)^2
        return (hi - lo) * (hi + lo + 2.0);
      }
      case KernelFamily::Constant:
        return std::clamp(b, -1.0, 0.0) - std::clamp(a, -1.0, 0.0);
      case KernelFamily::CustomTable: {
        double m = 0.0;
        for (const auto& r : table_) {
          const double lo = std::max(a, r.z_left);
          const double hi = std::min(b, r.z_right);
          if (hi > lo) m += r.value * (hi - lo);
        }
        return m;
      }
    }
    return 0.0;
  }

  /// c1 = integral of |z| gamma(z).
  double first_moment() const {
    if (!std::isfinite(first_moment_))
      throw Error("infinite-moment", "kernel declares an unbounded first moment");
    return first_moment_;
  }

private:
  explicit Kernel(KernelFamily f) : family_(f) {}

  KernelFamily family_;
  double support_left_ = 0.0;
  bool convex_ = false;
  bool nondecreasing_ = false;
  bool nonnegative_ = true;
  double total_mass_ = 0.0;
  double first_moment_ = 0.0;
  std::vector<KernelTableRow> table_;
};

inline AdmissibilityReport check_admissibility(const Kernel& k) {
  AdmissibilityReport r;
  r.supported_in_nonpositive = true;  // enforced at construction
  r.nonnegative = k.nonnegative();
  r.nondecreasing = k.nondecreasing_on_support();
  r.convex = k.convex_on_support();
  r.normalized = std::abs(k.total_mass() - 1.0) <= 1e-12;
  return r;
}

inline Kernel kernel_from_name(std::string_view name) {
  if (name == "exponential") return Kernel::exponential();
  if (name == "linear") return Kernel::linear();
  if (name == "constant") return Kernel::constant();
  throw ValidationError("unknown-kernel", std::string(name));
}

/// Reads a CSV kernel table with header `z_left,z_right,value`.
/// Errors carry the 1-based line number of the offending row.
inline Kernel read_kernel_table(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> ValidationError {
    return ValidationError("kernel-table",
                           "line " + std::to_string(lineno) + ": " + what);
  };
  auto trim = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };

  if (!std::getline(in, line)) {
    lineno = 1;
    throw fail("empty file");
  }
  ++lineno;
  if (trim(line) != "z_left,z_right,value")
    throw fail("expected header z_left,z_right,value");

  std::vector<KernelTableRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        v.push_back(std::stod(cell, &pos));
        if (trim(cell.substr(pos)).find_first_not_of(' ') != std::string::npos)
          throw fail("malformed number '" + cell + "'");
      } catch (const std::logic_error&) {
        throw fail("malformed number '" + cell + "'");
      }
    }
    if (v.size() != 3) throw fail("expected 3 columns");
    KernelTableRow r{v[0], v[1], v[2]};
    if (!std::isfinite(r.z_left) || !std::isfinite(r.z_right) ||
        !std::isfinite(r.value))
      throw fail("non-finite entry");
    if (!(r.z_left < r.z_right)) throw fail("z_left must be < z_right");
    if (r.z_right > 0.0) throw fail("z_right must be <= 0");
    if (r.value < 0.0) throw fail("negative value");
    if (!rows.empty() && std::abs(r.z_left - rows.back().z_right) > 1e-12)
      throw fail("row does not start where the previous one ends");
    rows.push_back(r);
  }
  if (rows.empty()) throw fail("no data rows");
  return Kernel::custom(std::move(rows));
}

}  // namespace nlcl
