#include <gtest/gtest.h>

#include <vector>

#include "flexbill/metrics.hpp"

using namespace flexbill;

namespace {

Mask all(std::size_t n) { return Mask(n, 1); }

}  // namespace

TEST(PeakRamp, ConstantSeriesIsZero) {
  const std::vector<double> d(10, 7.0);
  EXPECT_DOUBLE_EQ(peak_ramp_mean(d, all(10)), 0.0);
}

TEST(PeakRamp, HandComputedMean) {
  const std::vector<double> d{0, 4, 8, 4};
  EXPECT_DOUBLE_EQ(peak_ramp_mean(d, all(4)), 4.0);
}

TEST(PeakRamp, Homogeneous) {
  const std::vector<double> d{1, 3, -2, 5, 5, 0};
  std::vector<double> twice(d);
  for (auto& v : twice) v *= 2.0;
  EXPECT_DOUBLE_EQ(peak_ramp_mean(twice, all(6)), 2.0 * peak_ramp_mean(d, all(6)));
}

TEST(PeakRamp, PredecessorOutsideMaskCounts) {
  const std::vector<double> d{0, 10, 12, 0};
  const Mask m{0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(peak_ramp_mean(d, m), (10.0 + 2.0) / 2.0);
}

TEST(PeakRamp, MonthBoundaryPairsAreSkipped) {
  const std::vector<double> d{1, 2, 100, 101};
  const std::vector<std::size_t> starts{0, 2};
  EXPECT_DOUBLE_EQ(peak_ramp_mean(d, all(4), starts), 1.0);
}

TEST(PeakRamp, PartitionInvariantWithBoundaryExclusion) {
  const std::vector<double> a{3, 5, 4, 9};
  const std::vector<double> b{20, 18, 25};
  std::vector<double> ab(a), ba(b);
  ab.insert(ab.end(), b.begin(), b.end());
  ba.insert(ba.end(), a.begin(), a.end());
  const std::vector<std::size_t> s_ab{0, 4}, s_ba{0, 3};
  EXPECT_DOUBLE_EQ(peak_ramp_mean(ab, all(7), s_ab), peak_ramp_mean(ba, all(7), s_ba));
}

TEST(PeakRamp, EmptyMaskIsRejected) {
  const std::vector<double> d{1, 2, 3};
  EXPECT_THROW(peak_ramp_mean(d, Mask(3, 0)), std::invalid_argument);
  EXPECT_THROW(peak_ramp_mean(d, Mask{1, 0, 0}), std::invalid_argument);
  EXPECT_THROW(peak_ramp_mean(d, Mask(2, 1)), std::invalid_argument);
}

TEST(PeakNet, Means) {
  EXPECT_DOUBLE_EQ(peak_net_mean(std::vector<double>(5, 10.0), all(5)), 10.0);
  EXPECT_DOUBLE_EQ(peak_net_mean(std::vector<double>{-2, 2}, all(2)), 0.0);
  EXPECT_DOUBLE_EQ(peak_net_mean(std::vector<double>{5, 10, 15}, all(3)), 10.0);
  EXPECT_DOUBLE_EQ(peak_net_mean(std::vector<double>{100, 5, 10, 15}, Mask{0, 1, 1, 1}), 10.0);
  EXPECT_THROW(peak_net_mean(std::vector<double>{1}, Mask{0}), std::invalid_argument);
}

TEST(RelativeMetrics, Ratios) {
  const MetricSet storage{2.0, 30.0, 900.0};
  const MetricSet base{4.0, 60.0, 1000.0};
  const auto r = relative_metrics(storage, base);
  ASSERT_TRUE(r.ramp && r.net && r.bill);
  EXPECT_DOUBLE_EQ(*r.ramp, 0.5);
  EXPECT_DOUBLE_EQ(*r.net, 0.5);
  EXPECT_DOUBLE_EQ(*r.bill, 0.9);
}

TEST(RelativeMetrics, IdenticalSetsGiveOne) {
  const MetricSet x{1.5, -3.0, 42.0};
  const auto r = relative_metrics(x, x);
  EXPECT_DOUBLE_EQ(*r.ramp, 1.0);
  EXPECT_DOUBLE_EQ(*r.net, 1.0);
  EXPECT_DOUBLE_EQ(*r.bill, 1.0);
}

TEST(RelativeMetrics, ZeroBaseIsUndefined) {
  const auto r = relative_metrics(MetricSet{1.0, 1.0, 5.0}, MetricSet{0.0, 1.0, 0.0});
  EXPECT_FALSE(r.bill.has_value());
  EXPECT_FALSE(r.ramp.has_value());
  EXPECT_TRUE(r.net.has_value());
  EXPECT_FALSE(safe_ratio(1.0, 5e-10).has_value());
}
