#pragma once

// Quadrature weight families gamma_k^{eps,h} approximating the rescaled kernel
// on mesh cells, and a checker for the conditions the scheme's stability
// analysis relies on (monotonicity, normalization, convexity, localization,
// moment bound).

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlcl/error.hpp"
#include "nlcl/kernels.hpp"

namespace nlcl {

enum class WeightFamily { Exact, Riemann, NormalizedRiemann, Geometric };

inline std::string_view to_string(WeightFamily f) {
  switch (f) {
    case WeightFamily::Exact: return "exact";
    case WeightFamily::Riemann: return "riemann";
    case WeightFamily::NormalizedRiemann: return "normalized_riemann";
    case WeightFamily::Geometric: return "geometric";
  }
  return "unknown";
}

inline WeightFamily weight_family_from_name(std::string_view name) {
  if (name == "exact") return WeightFamily::Exact;
  if (name == "riemann") return WeightFamily::Riemann;
  if (name == "normalized_riemann") return WeightFamily::NormalizedRiemann;
  if (name == "geometric") return WeightFamily::Geometric;
  throw ValidationError("unknown-weight-family", std::string(name));
}

inline constexpr double kDefaultTailTol = 1e-12;

/// Truncated weight sequence w_0..w_K plus the mass that was cut off.
struct QuadratureWeights {
  std::vector<double> weights;
  double tail_mass = 0.0;
  double epsilon = 1.0;
  double h = 1.0;
  WeightFamily family = WeightFamily::Exact;
  std::optional<double> gamma0_parameter;
  /// Sum of the untruncated sequence (1 for normalized families).
  double analytic_total = 1.0;

  std::size_t size() const noexcept { return weights.size(); }
  std::size_t last_index() const noexcept { return weights.size() - 1; }

  /// Sum in ascending k, tail excluded.
  double sum() const noexcept {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  /// Whether the tail is folded into the right constant extension when W is
  /// computed. Unnormalized Riemann weights are left untouched.
  bool folds_tail() const noexcept { return family != WeightFamily::Riemann; }
};

struct WeightConditionReport {
  bool nonneg_monotone = false;
  bool normalized = false;
  bool convex = false;
  bool localized_proxy = false;
  bool moment_bounded = false;
  double measured_moment_ratio = 0.0;
  double worst_convexity_defect = 0.0;

  bool all() const {
    return nonneg_monotone && normalized && convex && localized_proxy &&
           moment_bounded;
  }
};

namespace detail {

inline void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError("invalid-parameter",
                          std::string(name) + " must be positive and finite");
}

/// ceil(x) that ignores round-off just above an integer.
inline std::size_t robust_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::size_t>(std::max(r, 0.0));
  return static_cast<std::size_t>(std::max(std::ceil(x), 0.0));
}

/// Smallest K with e^{-(K+1) h/eps} <= tail_tol.
inline std::size_t exponential_cutoff(double ratio_h_eps, double tail_tol) {
  const double need = -std::log(tail_tol) / ratio_h_eps;  // (K+1) >= need
  std::size_t kp1 = static_cast<std::size_t>(std::max(1.0, std::ceil(need)));
  while (kp1 > 1 && std::exp(-static_cast<double>(kp1 - 1) * ratio_h_eps) <= tail_tol)
    --kp1;
  while (std::exp(-static_cast<double>(kp1) * ratio_h_eps) > tail_tol) ++kp1;
  return kp1 - 1;
}

/// Riemann sample gamma(-k h/eps); points within round-off of the support's
/// left end count as outside (left-open support).
inline double riemann_sample(const Kernel& kernel, std::size_t k, double eps, double h) {
  const double z = -(static_cast<double>(k) * h) / eps;
  if (kernel.compact() &&
      z <= kernel.support_left() + 1e-12 * std::abs(kernel.support_left()))
    return 0.0;
  return kernel.evaluate(z);
}

}  // namespace detail

/// w_k = integral of gamma over [-(k+1)h/eps, -k h/eps].
inline QuadratureWeights exact_weights(const Kernel& kernel, double epsilon, double h,
                                       double tail_tol = kDefaultTailTol) {
  detail::check_positive(epsilon, "epsilon");
  detail::check_positive(h, "h");
  detail::check_positive(tail_tol, "tail_tol");

  QuadratureWeights q;
  q.epsilon = epsilon;
  q.h = h;
  q.family = WeightFamily::Exact;
  q.analytic_total = kernel.total_mass();
  const double r = h / epsilon;

  if (kernel.family() == KernelFamily::Exponential) {
    const std::size_t K = detail::exponential_cutoff(r, tail_tol);
    const double g0 = -std::expm1(-r);
    q.weights.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k)
      q.weights[k] = std::exp(-static_cast<double>(k) * r) * g0;
    q.tail_mass = std::exp(-static_cast<double>(K + 1) * r);
    return q;
  }

  const double span = -kernel.support_left() * epsilon / h;
  const std::size_t cells = std::max<std::size_t>(1, detail::robust_ceil(span));
  q.weights.resize(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const double hi = -(static_cast<double>(k) * h) / epsilon;
    double lo = -(static_cast<double>(k + 1) * h) / epsilon;
    if (k + 1 == cells) lo = std::min(lo, kernel.support_left());
    q.weights[k] = kernel.interval_mass(lo, hi);
  }
  q.tail_mass = 0.0;
  return q;
}

/// Unnormalized w_k = (h/eps) gamma(-k h/eps), gamma(0) as the left limit.
inline QuadratureWeights riemann_weights(const Kernel& kernel, double epsilon, double h,
                                         double tail_tol = kDefaultTailTol) {
  detail::check_positive(epsilon, "epsilon");
  detail::check_positive(h, "h");
  detail::check_positive(tail_tol, "tail_tol");

  QuadratureWeights q;
  q.epsilon = epsilon;
  q.h = h;
  q.family = WeightFamily::Riemann;
  const double r = h / epsilon;

  if (kernel.family() == KernelFamily::Exponential) {
    const std::size_t K = detail::exponential_cutoff(r, tail_tol);
    q.weights.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k)
      q.weights[k] = r * std::exp(-static_cast<double>(k) * r);
    const double g0 = -std::expm1(-r);
    q.tail_mass = r * std::exp(-static_cast<double>(K + 1) * r) / g0;
    q.analytic_total = r / g0;
    return q;
  }

  // Samples run up to and including the support's left end (where gamma = 0).
  const double span = -kernel.support_left() * epsilon / h;
  const std::size_t K = std::max<std::size_t>(1, detail::robust_ceil(span));
  q.weights.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k)
    q.weights[k] = r * detail::riemann_sample(kernel, k, epsilon, h);
  q.tail_mass = 0.0;
  q.analytic_total = q.sum();
  return q;
}

/// Riemann weights divided by their (tail-corrected) total.
inline QuadratureWeights normalized_riemann_weights(const Kernel& kernel, double epsilon,
                                                    double h,
                                                    double tail_tol = kDefaultTailTol) {
  QuadratureWeights q = riemann_weights(kernel, epsilon, h, tail_tol);
  const double total = q.sum() + q.tail_mass;
  if (!(total > 0.0))
    throw Error("degenerate-kernel", "Riemann weights sum to zero");
  for (double& w : q.weights) w /= total;
  q.tail_mass /= total;
  q.family = WeightFamily::NormalizedRiemann;
  q.analytic_total = 1.0;
  return q;
}

/// w_k = gamma0 (1 - gamma0)^k, built by the recursion w_{k+1} = (1-gamma0) w_k.
inline QuadratureWeights geometric_weights(double gamma0, double epsilon, double h,
                                           double tail_tol = kDefaultTailTol) {
  if (!(gamma0 > 0.0 && gamma0 < 1.0))
    throw ValidationError("out-of-range-gamma0", "gamma0 must lie in (0, 1)");
  detail::check_positive(epsilon, "epsilon");
  detail::check_positive(h, "h");
  detail::check_positive(tail_tol, "tail_tol");

  QuadratureWeights q;
  q.epsilon = epsilon;
  q.h = h;
  q.family = WeightFamily::Geometric;
  q.gamma0_parameter = gamma0;
  q.analytic_total = 1.0;

  const double ratio = 1.0 - gamma0;
  double w = gamma0;
  double tail = ratio;  // (1 - gamma0)^(K+1) for the current K
  q.weights.push_back(w);
  while (tail > tail_tol) {
    w *= ratio;
    q.weights.push_back(w);
    tail *= ratio;
  }
  q.tail_mass = std::pow(ratio, static_cast<double>(q.weights.size()));
  return q;
}

/// Geometric weights with gamma0 = 1 - e^{-h/eps}, i.e. the exponential
/// kernel's exact weights.
inline QuadratureWeights geometric_weights_for_exponential(double epsilon, double h,
                                                           double tail_tol = kDefaultTailTol) {
  detail::check_positive(epsilon, "epsilon");
  detail::check_positive(h, "h");
  return geometric_weights(-std::expm1(-h / epsilon), epsilon, h, tail_tol);
}

inline QuadratureWeights make_weights(WeightFamily family, const Kernel& kernel,
                                      double epsilon, double h,
                                      double tail_tol = kDefaultTailTol,
                                      std::optional<double> gamma0 = {}) {
  switch (family) {
    case WeightFamily::Exact: return exact_weights(kernel, epsilon, h, tail_tol);
    case WeightFamily::Riemann: return riemann_weights(kernel, epsilon, h, tail_tol);
    case WeightFamily::NormalizedRiemann:
      return normalized_riemann_weights(kernel, epsilon, h, tail_tol);
    case WeightFamily::Geometric:
      if (gamma0) return geometric_weights(*gamma0, epsilon, h, tail_tol);
      return geometric_weights_for_exponential(epsilon, h, tail_tol);
  }
  throw ValidationError("unknown-weight-family", "");
}

/// Checks the five weight conditions. The localization condition is a limit
/// over families, so only a proxy is checked: the mass at indices with
/// k h / eps >= localization_radius, tail included, must not exceed
/// localization_tol.
inline WeightConditionReport verify_weight_conditions(const QuadratureWeights& q,
                                                      double c_gamma,
                                                      double localization_radius = 40.0,
                                                      double localization_tol = 1e-10) {
  detail::check_positive(c_gamma, "c_gamma");
  WeightConditionReport rep;
  const auto& w = q.weights;
  const std::size_t K = w.size() - 1;

  bool mono = true;
  for (std::size_t k = 0; k < K; ++k) mono = mono && w[k] >= w[k + 1];
  mono = mono && w[K] >= 0.0 && q.tail_mass >= 0.0;
  rep.nonneg_monotone = mono;

  rep.normalized = std::abs(q.sum() + q.tail_mass - 1.0) <= 1e-12;

  // Past the end the sequence is zero when nothing was truncated; with a
  // truncated tail the next value is unknown and k = K is skipped.
  const std::size_t last_k = q.tail_mass == 0.0 ? K : (K == 0 ? 0 : K - 1);
  double worst = 0.0;
  for (std::size_t k = 1; k <= last_k; ++k) {
    const double next = k + 1 <= K ? w[k + 1] : 0.0;
    const double d2 = w[k - 1] + next - 2.0 * w[k];
    worst = std::min(worst, d2);
  }
  rep.worst_convexity_defect = -worst;
  rep.convex = worst >= -1e-14;

  double moment = 0.0;
  for (std::size_t k = 0; k <= K; ++k) moment += static_cast<double>(k) * w[k];
  rep.measured_moment_ratio = moment * q.h / q.epsilon;
  rep.moment_bounded = rep.measured_moment_ratio <= c_gamma;

  double far = q.tail_mass;
  for (std::size_t k = 0; k <= K; ++k)
    if (static_cast<double>(k) * q.h / q.epsilon >= localization_radius) far += w[k];
  rep.localized_proxy = far <= localization_tol;
  return rep;
}

}  // namespace nlcl
