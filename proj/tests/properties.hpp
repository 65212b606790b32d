#pragma once

// Randomized checks of the scheme's proven stability estimates. Each suite
// returns the worst observed violation so callers can print or assert it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nlcl/nlcl.hpp"
#include "oracles.hpp"

namespace props {

using namespace nlcl;

struct Outcome {
  bool pass = true;
  double worst = -1e300;  // largest (measured - bound); <= tol passes
  std::size_t cases = 0;
  double seconds = 0.0;
  std::string detail;
};

namespace detail {

template <class F>
Outcome timed(F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = body();
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

inline void note(Outcome& o, double excess, double tol, const std::string& where) {
  if (excess > o.worst) {
    o.worst = excess;
    if (excess > tol) {
      o.pass = false;
      o.detail = where;
    }
  }
}

inline Kernel pick_kernel(std::mt19937_64& rng, bool convex_only) {
  std::uniform_int_distribution<int> d(0, convex_only ? 1 : 2);
  switch (d(rng)) {
    case 0: return Kernel::exponential();
    case 1: return Kernel::linear();
    default: return Kernel::constant();
  }
}

inline std::string label(const Kernel& k, double eps, std::size_t trial) {
  return std::string(to_string(k.family())) + " eps=" + std::to_string(eps) +
         " trial=" + std::to_string(trial);
}

}  // namespace detail

// Grid used by every suite: 400 cells of width 1e-2, data constant over the
// outer 100 cells on each side, 100 steps. Waves and compact kernels stay
// inside the margins; exponential kernels are limited to eps <= 3h so their
// reach past the margin is below e^-33.
inline constexpr std::size_t kCells = 400;
inline constexpr std::size_t kMargin = 100;
inline constexpr double kH = 1e-2;

inline GridSpec grid() { return GridSpec::make(0.0, kCells * kH, kH); }

inline double random_eps(std::mt19937_64& rng, const Kernel& k) {
  const double hi = k.family() == KernelFamily::Exponential ? 3.0 : 20.0;
  std::uniform_real_distribution<double> u(0.3, hi);
  return u(rng) * kH;
}

/// min rho0 <= rho^n <= max rho0 under the max-principle CFL (lambda at the bound).
inline Outcome maximum_principle(std::size_t trials = 1000, std::size_t steps = 50,
                                 std::uint64_t seed = 1) {
  return detail::timed([&] {
    Outcome o;
    std::mt19937_64 rng(seed);
    const auto V = VelocityModel::greenshields();
    const double lambda = max_cfl_ratio(V, CflVariant::MaxPrinciple);
    for (std::size_t t = 0; t < trials; ++t) {
      const Kernel k = detail::pick_kernel(rng, false);
      const double eps = random_eps(rng, k);
      const Scheme s({grid(), exact_weights(k, eps, kH), V, lambda, eps,
                      CflVariant::MaxPrinciple});
      auto f = s.initial_field(oracle::random_bv(rng, kCells, kMargin));
      const auto [lo, hi] = std::minmax_element(f.rho.begin(), f.rho.end());
      const double mn = *lo, mx = *hi;
      for (std::size_t n = 0; n < steps; ++n) {
        f = s.step(f);
        const auto [a, b] = std::minmax_element(f.rho.begin(), f.rho.end());
        detail::note(o, std::max(mn - *a, *b - mx), 1e-12, detail::label(k, eps, t));
      }
      ++o.cases;
    }
    return o;
  });
}

/// min rho0 <= W^n <= max rho0 for every level.
inline Outcome w_bounds(std::size_t trials = 300, std::size_t steps = 50,
                        std::uint64_t seed = 2) {
  return detail::timed([&] {
    Outcome o;
    std::mt19937_64 rng(seed);
    const auto V = VelocityModel::greenshields();
    for (std::size_t t = 0; t < trials; ++t) {
      const Kernel k = detail::pick_kernel(rng, false);
      const double eps = random_eps(rng, k);
      const Scheme s({grid(), exact_weights(k, eps, kH), V, 0.25, eps, CflVariant::Main});
      auto f = s.initial_field(oracle::random_bv(rng, kCells, kMargin));
      const auto [lo, hi] = std::minmax_element(f.rho.begin(), f.rho.end());
      const double mn = *lo, mx = *hi;
      for (std::size_t n = 0; n <= steps; ++n) {
        const auto [a, b] = std::minmax_element(f.w.begin(), f.w.end());
        detail::note(o, std::max(mn - *a, *b - mx), 1e-12, detail::label(k, eps, t));
        f = s.step(f);
      }
      ++o.cases;
    }
    return o;
  });
}

/// TV(W^{n+1}) <= TV(W^n) and TV(W^0) <= TV(rho0) for exact weights of convex
/// kernels under the main CFL (lambda at the bound).
inline Outcome spatial_tvd(std::size_t trials = 300, std::size_t steps = 100,
                           std::uint64_t seed = 3) {
  return detail::timed([&] {
    Outcome o;
    std::mt19937_64 rng(seed);
    const auto V = VelocityModel::greenshields();
    const double lambda = max_cfl_ratio(V, CflVariant::Main);
    for (std::size_t t = 0; t < trials; ++t) {
      const Kernel k = detail::pick_kernel(rng, true);
      const double eps = random_eps(rng, k);
      const Scheme s({grid(), exact_weights(k, eps, kH), V, lambda, eps, CflVariant::Main});
      auto f = s.initial_field(oracle::random_bv(rng, kCells, kMargin));
      const std::string where = detail::label(k, eps, t);
      detail::note(o, tv(f.w) - tv(f.rho), 1e-12, where + " n=0");
      double prev = tv(f.w);
      for (std::size_t n = 0; n < steps; ++n) {
        f = s.step(f);
        const double cur = tv(f.w);
        detail::note(o, cur - prev, 1e-12, where + " n=" + std::to_string(n + 1));
        prev = cur;
      }
      ++o.cases;
    }
    return o;
  });
}

/// sum_j |W^{n+1}_j - W^n_j| <= lambda (|V| + |V'|) TV(rho0) for every step.
inline Outcome temporal_tv(std::size_t trials = 300, std::size_t steps = 100,
                           std::uint64_t seed = 4) {
  return detail::timed([&] {
    Outcome o;
    std::mt19937_64 rng(seed);
    const auto V = VelocityModel::greenshields();
    const double lambda = max_cfl_ratio(V, CflVariant::Main);
    for (std::size_t t = 0; t < trials; ++t) {
      const Kernel k = detail::pick_kernel(rng, true);
      const double eps = random_eps(rng, k);
      const Scheme s({grid(), exact_weights(k, eps, kH), V, lambda, eps, CflVariant::Main});
      auto f = s.initial_field(oracle::random_bv(rng, kCells, kMargin));
      const double bound = lambda * (V.sup_norm + V.lip_norm) * tv(f.rho);
      for (std::size_t n = 0; n < steps; ++n) {
        const auto g = s.step(f);
        double inc = 0.0;
        for (std::size_t j = 0; j < kCells; ++j) inc += std::abs(g.w[j] - f.w[j]);
        detail::note(o, inc - bound, 1e-12, detail::label(k, eps, t));
        f = g;
      }
      ++o.cases;
    }
    return o;
  });
}

/// Pointwise nonlocal entropy residual for W under the max-principle CFL.
inline Outcome nonlocal_entropy(std::size_t trials = 100, std::size_t steps = 40,
                                std::uint64_t seed = 5) {
  return detail::timed([&] {
    Outcome o;
    std::mt19937_64 rng(seed);
    const auto V = VelocityModel::greenshields();
    const double lambda = max_cfl_ratio(V, CflVariant::MaxPrinciple);
    const double tau = lambda * kH;
    for (std::size_t t = 0; t < trials; ++t) {
      const Kernel k = detail::pick_kernel(rng, true);
      const double eps = random_eps(rng, k);
      const auto q = exact_weights(k, eps, kH);
      const Scheme s({grid(), q, V, lambda, eps, CflVariant::MaxPrinciple});
      auto f = s.initial_field(oracle::random_bv(rng, kCells, kMargin));
      for (std::size_t n = 0; n < steps; ++n) {
        const auto g = s.step(f);
        for (int ic = 0; ic <= 10; ++ic) {
          const double c = ic / 10.0;
          const auto r = nonlocal_entropy_step(f.rho, f.w, g.w, q, V, tau, kH, c, {});
          detail::note(o, r.max_residual, 1e-10,
                       detail::label(k, eps, t) + " c=" + std::to_string(c));
        }
        f = g;
      }
      ++o.cases;
    }
    return o;
  });
}

/// W_{j+1} - W_j = (g0 / (1 - g0)) (W_j - rho_j) at every level, geometric weights.
inline Outcome geometric_identity(std::size_t trials = 200, std::size_t steps = 50,
                                  std::uint64_t seed = 6) {
  return detail::timed([&] {
    Outcome o;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ug(0.05, 0.9);
    const auto V = VelocityModel::greenshields();
    for (std::size_t t = 0; t < trials; ++t) {
      const double g0 = ug(rng);
      const double eps = -kH / std::log1p(-g0);
      // residual is r * tail * jump, so the tail is cut well below 1e-12 / r
      const auto q = geometric_weights(g0, eps, kH, 1e-15);
      const Scheme s({grid(), q, V, 0.25, eps, CflVariant::Main});
      auto f = s.initial_field(oracle::random_bv(rng, kCells, kMargin));
      const double r = g0 / (1.0 - g0);
      for (std::size_t n = 0; n <= steps; ++n) {
        double worst = 0.0;
        for (std::size_t j = 0; j + 1 < kCells; ++j)
          worst = std::max(worst, std::abs((f.w[j + 1] - f.w[j]) - r * (f.w[j] - f.rho[j])));
        detail::note(o, worst, 1e-12, "gamma0=" + std::to_string(g0));
        f = s.step(f);
      }
      ++o.cases;
    }
    return o;
  });
}

/// h sum |W - rho| <= eps TV(W) for geometric weights of the exponential kernel.
inline Outcome deviation_bound(std::size_t trials = 200, std::size_t steps = 50,
                               std::uint64_t seed = 7) {
  return detail::timed([&] {
    Outcome o;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ue(0.3, 3.0);
    const auto V = VelocityModel::greenshields();
    for (std::size_t t = 0; t < trials; ++t) {
      const double eps = ue(rng) * kH;
      const auto q = geometric_weights_for_exponential(eps, kH);
      const Scheme s({grid(), q, V, 0.25, eps, CflVariant::Main});
      auto f = s.initial_field(oracle::random_bv(rng, kCells, kMargin));
      for (std::size_t n = 0; n <= steps; ++n) {
        detail::note(o, w_rho_deviation(f.rho, f.w, kH) - 1.0 * eps * tv(f.w), 1e-12,
                     "eps=" + std::to_string(eps));
        f = s.step(f);
      }
      ++o.cases;
    }
    return o;
  });
}

}  // namespace props
