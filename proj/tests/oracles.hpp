#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's closed forms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                       double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13, int max_depth = 50) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  return detail::adaptive(f, a, fa, b, fb, m, fm, detail::simpson(a, fa, b, fb, fm), tol,
                          max_depth);
}

/// Integral split at the given interior breakpoints (for piecewise integrands).
inline double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                               std::vector<double> cuts, double tol = 1e-13) {
  double s = 0.0;
  double lo = a;
  cuts.push_back(b);
  for (double c : cuts) {
    if (c <= lo) continue;
    const double hi = std::min(c, b);
    s += integrate(f, lo, hi, tol);
    lo = hi;
    if (lo >= b) break;
  }
  return s;
}

/// Midpoint-rule average of f over [a, b] with n samples.
inline double sampled_average(const std::function<double(double)>& f, double a, double b,
                              std::size_t n) {
  double s = 0.0;
  const double dx = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) s += f(a + (static_cast<double>(i) + 0.5) * dx);
  return s / static_cast<double>(n);
}

/// Direct W_j = sum_k w_k rho_{min(j+k, N-1)} + tail rho_{N-1}, no tricks.
inline std::vector<double> nonlocal_impact(const std::vector<double>& rho,
                                           const std::vector<double>& w, double tail) {
  const std::size_t n = rho.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * rho[std::min(j + k, n - 1)];
    out[j] = s + tail * rho[n - 1];
  }
  return out;
}

/// Random BV data in [0, 1]: piecewise constant with a few jumps plus an
/// optional smooth bump, constant over `margin` cells at both ends.
inline std::vector<double> random_bv(std::mt19937_64& rng, std::size_t n, std::size_t margin) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pieces(1, 8);
  std::vector<double> rho(n);
  const int np = pieces(rng);
  std::vector<double> cuts;
  for (int i = 0; i < np; ++i) cuts.push_back(u(rng));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> vals;
  for (int i = 0; i <= np; ++i) vals.push_back(u(rng));
  const double amp = u(rng) < 0.5 ? 0.0 : 0.3 * u(rng);
  const double centre = u(rng);
  const std::size_t inner = n - 2 * margin;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jj = j < margin ? 0 : (j >= n - margin ? inner - 1 : j - margin);
    const double x = (static_cast<double>(jj) + 0.5) / static_cast<double>(inner);
    std::size_t p = 0;
    while (p < cuts.size() && x >= cuts[p]) ++p;
    double v = vals[p] + amp * std::exp(-200.0 * (x - centre) * (x - centre));
    rho[j] = std::clamp(v, 0.0, 1.0);
  }
  return rho;
}

}  // namespace oracle
