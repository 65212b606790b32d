#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "nlcl/error.hpp"

namespace nlcl {

enum class VelocityFamily { Greenshields, Krystek, Underwood, ClippedGreenshields };

inline std::string_view to_string(VelocityFamily f) {
  switch (f) {
    case VelocityFamily::Greenshields: return "greenshields";
    case VelocityFamily::Krystek: return "krystek";
    case VelocityFamily::Underwood: return "underwood";
    case VelocityFamily::ClippedGreenshields: return "clipped_greenshields";
  }
  return "unknown";
}

/// Nonincreasing velocity V on [0, 1] with its sup and Lipschitz norms there.
///   greenshields          1 - x
///   krystek               (1 - x)^4
///   underwood             exp(-x)
///   clipped_greenshields  max(1 - x, 0)
struct VelocityModel {
  VelocityFamily family = VelocityFamily::Greenshields;
  double sup_norm = 1.0;
  double lip_norm = 1.0;
  bool nonincreasing = true;

  static VelocityModel make(VelocityFamily f) {
    VelocityModel v;
    v.family = f;
    v.sup_norm = 1.0;
    v.lip_norm = f == VelocityFamily::Krystek ? 4.0 : 1.0;
    v.nonincreasing = true;
    return v;
  }

  static VelocityModel greenshields() { return make(VelocityFamily::Greenshields); }
  static VelocityModel krystek() { return make(VelocityFamily::Krystek); }
  static VelocityModel underwood() { return make(VelocityFamily::Underwood); }
  static VelocityModel clipped_greenshields() {
    return make(VelocityFamily::ClippedGreenshields);
  }

  double operator()(double x) const noexcept {
    switch (family) {
      case VelocityFamily::Greenshields: return 1.0 - x;
      case VelocityFamily::Krystek: {
        const double u = 1.0 - x;
        const double u2 = u * u;
        return u2 * u2;
      }
      case VelocityFamily::Underwood: return std::exp(-x);
      case VelocityFamily::ClippedGreenshields: return std::max(1.0 - x, 0.0);
    }
    return 0.0;
  }
};

inline VelocityModel velocity_from_name(std::string_view name) {
  if (name == "greenshields") return VelocityModel::greenshields();
  if (name == "krystek") return VelocityModel::krystek();
  if (name == "underwood") return VelocityModel::underwood();
  if (name == "clipped_greenshields") return VelocityModel::clipped_greenshields();
  throw ValidationError("unknown-velocity", std::string(name));
}

}  // namespace nlcl
