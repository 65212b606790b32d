#include <gtest/gtest.h>

#include "properties.hpp"

namespace {

void expect_suite(const props::Outcome& o) {
  EXPECT_TRUE(o.pass) << "worst excess " << o.worst << " at " << o.detail;
  EXPECT_LT(o.seconds, 60.0);
  EXPECT_GT(o.cases, 0u);
}

}  // namespace

TEST(Properties, MaximumPrinciple) { expect_suite(props::maximum_principle()); }
TEST(Properties, WBounds) { expect_suite(props::w_bounds()); }
TEST(Properties, SpatialTvd) { expect_suite(props::spatial_tvd()); }
TEST(Properties, TemporalTv) { expect_suite(props::temporal_tv()); }
TEST(Properties, NonlocalEntropy) { expect_suite(props::nonlocal_entropy()); }
TEST(Properties, GeometricIdentity) { expect_suite(props::geometric_identity()); }
TEST(Properties, DeviationBound) { expect_suite(props::deviation_bound()); }
