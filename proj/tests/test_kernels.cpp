#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nlcl/kernels.hpp"
#include "oracles.hpp"

using namespace nlcl;

namespace {

std::vector<Kernel> builtins() {
  return {Kernel::exponential(), Kernel::linear(), Kernel::constant()};
}

}  // namespace

TEST(KernelEvaluate, PointValuesAndSupport) {
  const auto e = Kernel::exponential();
  EXPECT_DOUBLE_EQ(e.evaluate(0.0), 1.0);
  EXPECT_DOUBLE_EQ(e.evaluate(-1.0), std::exp(-1.0));
  EXPECT_EQ(e.evaluate(0.5), 0.0);

  const auto l = Kernel::linear();
  EXPECT_DOUBLE_EQ(l.evaluate(0.0), 2.0);
  EXPECT_DOUBLE_EQ(l.evaluate(-0.5), 1.0);
  EXPECT_EQ(l.evaluate(-1.0), 0.0);  // left-open support
  EXPECT_EQ(l.evaluate(-2.0), 0.0);

  const auto c = Kernel::constant();
  EXPECT_EQ(c.evaluate(-0.999), 1.0);
  EXPECT_EQ(c.evaluate(-1.0), 0.0);
  EXPECT_EQ(c.evaluate(1e-9), 0.0);
}

TEST(KernelIntervalMass, Examples) {
  EXPECT_NEAR(Kernel::linear().interval_mass(-0.5, 0.0), 0.75, 1e-15);
  EXPECT_NEAR(Kernel::linear().interval_mass(-1.0, -0.5), 0.25, 1e-15);
  EXPECT_NEAR(Kernel::constant().interval_mass(-0.25, 0.0), 0.25, 1e-15);
  EXPECT_NEAR(Kernel::exponential().interval_mass(-1.0, 0.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_EQ(Kernel::exponential().interval_mass(0.5, 2.0), 0.0);
}

TEST(KernelIntervalMass, RejectsReversedInterval) {
  try {
    Kernel::linear().interval_mass(0.0, -1.0);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "invalid-interval");
  }
}

TEST(KernelIntervalMass, TotalMassIsOne) {
  EXPECT_NEAR(Kernel::linear().interval_mass(-1.0, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(Kernel::constant().interval_mass(-1.0, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(Kernel::exponential().interval_mass(-800.0, 0.0), 1.0, 1e-14);
}

TEST(KernelIntervalMass, Additive) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 0.5);
  for (const auto& k : builtins())
    for (int i = 0; i < 200; ++i) {
      double p[3] = {u(rng), u(rng), u(rng)};
      std::sort(p, p + 3);
      EXPECT_NEAR(k.interval_mass(p[0], p[1]) + k.interval_mass(p[1], p[2]),
                  k.interval_mass(p[0], p[2]), 1e-14);
    }
}

TEST(KernelIntervalMass, MatchesNumericOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 0.5);
  for (const auto& k : builtins())
    for (int i = 0; i < 100; ++i) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      const double ref =
          oracle::integrate_pieces([&](double z) { return k.evaluate(z); }, a, b, {-1.0, 0.0});
      EXPECT_NEAR(k.interval_mass(a, b), ref, 1e-10) << to_string(k.family());
    }
}

TEST(KernelFirstMoment, ExamplesAgainstOracle) {
  // oracle: integral of |z| gamma(z) by adaptive quadrature
  const double m_exp =
      oracle::integrate([](double z) { return -z * std::exp(z); }, -60.0, 0.0, 1e-14);
  const double m_lin = oracle::integrate([](double z) { return -z * 2.0 * (z + 1.0); }, -1.0, 0.0);
  const double m_con = oracle::integrate([](double z) { return -z; }, -1.0, 0.0);
  EXPECT_NEAR(m_exp, 1.0, 1e-10);
  EXPECT_NEAR(Kernel::exponential().first_moment(), m_exp, 1e-10);
  EXPECT_NEAR(Kernel::linear().first_moment(), m_lin, 1e-12);
  EXPECT_NEAR(Kernel::constant().first_moment(), m_con, 1e-12);
  EXPECT_NEAR(Kernel::linear().first_moment(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(Kernel::constant().first_moment(), 0.5, 1e-15);
}

TEST(KernelFirstMoment, InfiniteDeclaredMomentThrows) {
  const auto k = Kernel::custom({{-1.0, 0.0, 1.0}}, std::numeric_limits<double>::infinity());
  try {
    k.first_moment();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "infinite-moment");
  }
}

TEST(KernelAdmissibility, BuiltIns) {
  EXPECT_TRUE(check_admissibility(Kernel::exponential()).all());
  EXPECT_TRUE(check_admissibility(Kernel::linear()).all());
  const auto c = check_admissibility(Kernel::constant());
  EXPECT_FALSE(c.convex);
  EXPECT_TRUE(c.supported_in_nonpositive);
  EXPECT_TRUE(c.nonnegative);
  EXPECT_TRUE(c.nondecreasing);
  EXPECT_TRUE(c.normalized);
}

TEST(KernelAdmissibility, CustomTables) {
  // staircase approximation of 2(z+1): convex increments, nondecreasing
  const auto stairs = Kernel::custom({{-1.0, -0.5, 0.5}, {-0.5, 0.0, 1.5}});
  const auto r = check_admissibility(stairs);
  EXPECT_TRUE(r.nondecreasing);
  EXPECT_TRUE(r.convex);
  EXPECT_TRUE(r.normalized);

  const auto decreasing = Kernel::custom({{-1.0, -0.5, 1.5}, {-0.5, 0.0, 0.5}});
  EXPECT_FALSE(check_admissibility(decreasing).nondecreasing);
  EXPECT_FALSE(check_admissibility(decreasing).convex);

  const auto half = Kernel::custom({{-1.0, 0.0, 0.5}});
  EXPECT_FALSE(check_admissibility(half).normalized);
}

TEST(KernelTableCsv, ParsesAndComputesMass) {
  std::istringstream in("z_left,z_right,value\n-1,-0.5,0.5\n-0.5,0,1.5\n");
  const auto k = read_kernel_table(in);
  EXPECT_EQ(k.family(), KernelFamily::CustomTable);
  EXPECT_NEAR(k.interval_mass(-1.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(k.interval_mass(-0.75, -0.25), 0.5 * 0.25 + 1.5 * 0.25, 1e-15);
  // first moment: 0.5 * (1 - 0.25)/2 + 1.5 * 0.25/2
  EXPECT_NEAR(k.first_moment(), 0.5 * 0.375 + 1.5 * 0.125, 1e-15);
}

TEST(KernelTableCsv, ErrorsCarryLineNumbers) {
  auto code_and_msg = [](const std::string& text) -> std::string {
    std::istringstream in(text);
    try {
      read_kernel_table(in);
    } catch (const ValidationError& e) {
      EXPECT_EQ(e.code(), "kernel-table");
      return e.what();
    }
    return "no error";
  };
  EXPECT_NE(code_and_msg("a,b,c\n").find("line 1"), std::string::npos);
  EXPECT_NE(code_and_msg("z_left,z_right,value\n-1,0,1\n-1,0\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(code_and_msg("z_left,z_right,value\n-1,-0.5,1\n-0.4,0,1\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(code_and_msg("z_left,z_right,value\n-1,0.5,1\n").find("line 2"), std::string::npos);
  EXPECT_NE(code_and_msg("z_left,z_right,value\n-1,0,x\n").find("line 2"), std::string::npos);
  EXPECT_NE(code_and_msg("z_left,z_right,value\n").find("no data"), std::string::npos);
}

TEST(KernelFromName, UnknownNameIsValidationError) {
  EXPECT_THROW(kernel_from_name("gaussian"), ValidationError);
  EXPECT_EQ(kernel_from_name("linear").family(), KernelFamily::Linear);
}
