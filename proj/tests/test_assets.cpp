#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "flexbill/assets.hpp"
#include "flexbill/tariff.hpp"
#include "support/fixtures.hpp"

using namespace flexbill;

namespace {

std::string hourly_csv(int hours, double kw, int skip = -1) {
  std::ostringstream os;
  os << "timestamp,kw\n";
  for (int h = 0; h < hours; ++h) {
    if (h == skip) continue;
    char buf[40];
    std::snprintf(buf, sizeof buf, "2021-01-%02dT%02d:00,%.2f\n", 1 + h / 24, h % 24, kw);
    os << buf;
  }
  return os.str();
}

}  // namespace

TEST(SeriesTable, HourlyIsStepHeld) {
  const auto table = SeriesTable::parse_csv(hourly_csv(24, 100.0));
  EXPECT_EQ(table.resolution_minutes(), 60);
  const auto d = table.slice(TimeGrid(2021, 1, 1, 96));
  ASSERT_EQ(d.size(), 96u);
  for (double v : d) EXPECT_DOUBLE_EQ(v, 100.0);
}

TEST(SeriesTable, StepHoldPreservesHourlyShape) {
  const auto table = SeriesTable::parse_csv(
      "timestamp,kw\n2021-01-01T00:00,1\n2021-01-01 01:00,5\n2021-01-01T02:00:00,2\n");
  const auto d = table.slice(TimeGrid(2021, 1, 1, 12));
  const std::vector<double> expect{1, 1, 1, 1, 5, 5, 5, 5, 2, 2, 2, 2};
  EXPECT_EQ(d, expect);
}

TEST(SeriesTable, QuarterHourPassthrough) {
  std::ostringstream os;
  os << "timestamp,kw\n";
  for (int q = 0; q < 96; ++q) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "2021-01-01T%02d:%02d,%.1f\n", q / 4, (q % 4) * 15,
                  q == 70 ? 220.9 : 10.0 + q);
    os << buf;
  }
  const auto table = SeriesTable::parse_csv(os.str());
  EXPECT_EQ(table.resolution_minutes(), 15);
  EXPECT_DOUBLE_EQ(table.max_value(), 220.9);
  const auto profile = load_from_table(table, TimeGrid(2021, 1, 1, 96));
  EXPECT_DOUBLE_EQ(profile.annual_max, 220.9);
  EXPECT_DOUBLE_EQ(profile.d_base[3], 13.0);
}

TEST(SeriesTable, MissingHourIsRejected) {
  EXPECT_THROW(SeriesTable::parse_csv(hourly_csv(48, 10.0, 17)), ValidationError);
}

TEST(SeriesTable, DuplicateTimestampIsRejected) {
  EXPECT_THROW(SeriesTable::parse_csv("timestamp,kw\n2021-01-01T00:00,1\n2021-01-01T00:00,2\n"),
               ValidationError);
}

TEST(SeriesTable, NegativeReadingIsRejected) {
  EXPECT_THROW(SeriesTable::parse_csv("timestamp,kw\n2021-01-01T00:00,1\n2021-01-01T01:00,-2\n"),
               ValidationError);
}

TEST(SeriesTable, MalformedInputIsRejected) {
  EXPECT_THROW(SeriesTable::parse_csv("time,value\n2021-01-01T00:00,1\n"), ValidationError);
  EXPECT_THROW(SeriesTable::parse_csv("timestamp,kw\n2021-13-01T00:00,1\n"), ValidationError);
  EXPECT_THROW(SeriesTable::parse_csv("timestamp,kw\n2021-01-01T00:00,abc\n"), ValidationError);
  EXPECT_THROW(SeriesTable::parse_csv("timestamp,kw\n2021-01-01T00:00,nan\n"), ValidationError);
  EXPECT_THROW(SeriesTable::parse_csv("timestamp,kw\n2021-01-01T00:00,1\n2021-01-01T00:30,1\n"),
               ValidationError);
  EXPECT_THROW(SeriesTable::parse_csv(""), ValidationError);
}

TEST(SeriesTable, SliceOutsideCoverageIsRejected) {
  const auto table = SeriesTable::parse_csv(hourly_csv(24, 1.0));
  EXPECT_THROW(table.slice(TimeGrid(2021, 1, 1, 97)), ValidationError);
}

TEST(SeriesTable, BundledLoadCoversTheYear) {
  const auto table = SeriesTable::read_csv(flexbill::testing::bundled("load_synthetic_2021.csv"));
  EXPECT_EQ(table.resolution_minutes(), 60);
  EXPECT_EQ(table.size(), 8760u * 4u);
  EXPECT_DOUBLE_EQ(table.max_value(), 220.9);
  for (int m = 1; m <= 12; ++m) EXPECT_NO_THROW(table.slice(build_time_grid(2021, m)));
}

TEST(SynthPv, ZeroNameplateIsAllZero) {
  const auto pv = synth_pv(0.0, build_time_grid(2021, 6));
  EXPECT_TRUE(std::all_of(pv.p_pv.begin(), pv.p_pv.end(), [](double v) { return v == 0.0; }));
}

TEST(SynthPv, PeakIsDeratedNameplate) {
  for (int m = 1; m <= 12; ++m) {
    const auto pv = synth_pv(231.8, build_time_grid(2021, m));
    EXPECT_NEAR(*std::max_element(pv.p_pv.begin(), pv.p_pv.end()), 197.03, 1e-9) << m;
    EXPECT_DOUBLE_EQ(pv.p_pv[0], 0.0);
    EXPECT_DOUBLE_EQ(pv.p_pv[96 * 3], 0.0);
  }
  EXPECT_THROW(synth_pv(-1.0, build_time_grid(2021, 1)), ValidationError);
}

TEST(SynthPv, SummerDaysAreLonger) {
  auto daylight_steps = [](int month) {
    const auto pv = synth_pv(100.0, TimeGrid(2021, month, 1, 96));
    return std::count_if(pv.p_pv.begin(), pv.p_pv.end(), [](double v) { return v > 0.0; });
  };
  EXPECT_GT(daylight_steps(6), daylight_steps(12));
}

TEST(FlexBounds, ScaleWithBaseDemand) {
  const std::vector<double> base{100.0, 50.0, 0.0};
  const auto zero = flex_bounds(FlexSpec{0.0, 4.0}, base);
  for (std::size_t t = 0; t < base.size(); ++t) {
    EXPECT_DOUBLE_EQ(zero.lower[t], 0.0);
    EXPECT_DOUBLE_EQ(zero.upper[t], 0.0);
  }
  const auto full = flex_bounds(FlexSpec{1.0, 4.0}, base);
  EXPECT_DOUBLE_EQ(full.lower[0], -100.0);
  EXPECT_DOUBLE_EQ(full.upper[0], 100.0);
  const auto part = flex_bounds(FlexSpec{0.6, 4.0}, base);
  EXPECT_DOUBLE_EQ(part.lower[1], -30.0);
  EXPECT_DOUBLE_EQ(part.upper[1], 30.0);
}

TEST(FlexSpec, WindowStepsAndValidation) {
  EXPECT_EQ((FlexSpec{0.5, 12.0}.delta_steps()), 48u);
  EXPECT_EQ((FlexSpec{0.5, 0.25}.delta_steps()), 1u);
  EXPECT_THROW(validate(FlexSpec{1.5, 4.0}), ValidationError);
  EXPECT_THROW(validate(FlexSpec{0.5, 0.0}), ValidationError);
  EXPECT_THROW(validate(FlexSpec{0.5, 1.1}), ValidationError);
  EXPECT_NO_THROW(validate(FlexSpec{0.5, 24.0}));
}

TEST(BatterySizing, FromSweepRatios) {
  const auto b = battery_from_sweep(0.10, 4.0, 220.9);
  EXPECT_NEAR(b.bpr, 22.09, 1e-12);
  EXPECT_NEAR(b.ber, 88.36, 1e-12);
  EXPECT_DOUBLE_EQ(b.eta, 0.85);
  EXPECT_NEAR(b.j_init, 44.18, 1e-12);
  const auto none = battery_from_sweep(0.0, 4.0, 220.9);
  EXPECT_DOUBLE_EQ(none.bpr, 0.0);
  EXPECT_DOUBLE_EQ(none.ber, 0.0);
  EXPECT_FALSE(none.present());
  EXPECT_THROW(battery_from_sweep(-0.1, 4.0, 220.9), ValidationError);
}

TEST(BatterySizing, Validation) {
  EXPECT_THROW(validate(BatterySpec{10, 40, 0.0, 20}), ValidationError);
  EXPECT_THROW(validate(BatterySpec{10, 40, 0.85, 50}), ValidationError);
  EXPECT_THROW(validate(BatterySpec{-1, 40, 0.85, 20}), ValidationError);
  EXPECT_NO_THROW(validate(BatterySpec{10, 40, 1.0, 0}));
}

TEST(OptionSEligibility, BoundaryIsInclusive) {
  EXPECT_TRUE(option_s_eligible(BatterySpec{22.09, 88.36, 0.85, 0}, 220.9));
  EXPECT_TRUE(option_s_eligible(battery_from_sweep(0.10, 1.0, 220.9), 220.9));
  EXPECT_FALSE(option_s_eligible(BatterySpec{22.0, 88.0, 0.85, 0}, 220.9));
  EXPECT_FALSE(option_s_eligible(BatterySpec{0.0, 0.0, 0.85, 0}, 220.9));
}

TEST(SyntheticLoad, DeterministicAndScaled) {
  const auto a = synth_load_hourly(2021, 3);
  const auto b = synth_load_hourly(2021, 3);
  ASSERT_EQ(a.size(), 8760u);
  EXPECT_EQ(to_csv(a), to_csv(b));
  double peak = 0.0;
  for (const auto& r : a) {
    EXPECT_GE(r.kw, 0.0);
    peak = std::max(peak, r.kw);
  }
  EXPECT_DOUBLE_EQ(peak, 220.9);
  EXPECT_NE(to_csv(a), to_csv(synth_load_hourly(2021, 4)));
  const auto parsed = SeriesTable::parse_csv(to_csv(a));
  EXPECT_DOUBLE_EQ(parsed.max_value(), 220.9);
}
