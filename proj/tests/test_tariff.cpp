#include <gtest/gtest.h>

#include <vector>

#include "flexbill/tariff.hpp"
#include "support/fixtures.hpp"

using namespace flexbill;
using flexbill::testing::bundled;
using flexbill::testing::flat_tariff;

namespace {

const char* kMinimal = R"({
  "id": "t",
  "demand_rate_max": 10,
  "demand_rates": {"peak": 5},
  "energy_rates": {"peak": 0.30, "off_peak": 0.10},
  "non_bypassable_charge": 0.025,
  "tou_rules": [
    {"period": "peak", "hour_ranges": [[16, 21]]},
    {"period": "off_peak", "hour_ranges": [[0, 16], [21, 24]]}
  ]
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST(TariffLoad, BundledBase) {
  const auto t = load_tariff(bundled("base_b19.json"));
  EXPECT_EQ(t.id, "base_b19");
  const auto& periods = t.calendar.periods();
  for (const char* p : {"peak", "partial_peak", "off_peak"}) {
    EXPECT_NE(std::find(periods.begin(), periods.end(), p), periods.end()) << p;
  }
  EXPECT_DOUBLE_EQ(t.nbc, 0.025);
}

TEST(TariffLoad, StoragePairIsStorageCentric) {
  const auto base = load_tariff(bundled("base_b19.json"));
  const auto storage = load_tariff(bundled("storage_option_s.json"));
  EXPECT_LT(storage.dr_max, base.dr_max);
  for (const auto& p : base.calendar.periods()) {
    EXPECT_LE(storage.tou_demand_rate(p), base.tou_demand_rate(p)) << p;
  }
  EXPECT_GT(storage.energy_rate("peak"), base.energy_rate("peak"));
  EXPECT_EQ(storage.calendar.periods(), base.calendar.periods());
}

TEST(TariffLoad, MissingDemandRateDefaultsToZero) {
  const auto t = parse_tariff_json(kMinimal);
  EXPECT_DOUBLE_EQ(t.tou_demand_rate("peak"), 5.0);
  EXPECT_DOUBLE_EQ(t.tou_demand_rate("off_peak"), 0.0);
  EXPECT_FALSE(t.all_demand_rates_positive());
}

TEST(TariffLoad, EnergyRateBelowNonBypassableIsRejected) {
  EXPECT_THROW(parse_tariff_json(replace(kMinimal, "\"peak\": 0.30", "\"peak\": 0.01")), ValidationError);
}

TEST(TariffLoad, NegativeRateIsRejected) {
  EXPECT_THROW(parse_tariff_json(replace(kMinimal, "\"peak\": 5", "\"peak\": -5")), ValidationError);
  EXPECT_THROW(parse_tariff_json(replace(kMinimal, "\"demand_rate_max\": 10", "\"demand_rate_max\": -1")),
               ValidationError);
}

TEST(TariffLoad, RateForUnknownPeriodIsRejected) {
  EXPECT_THROW(parse_tariff_json(replace(kMinimal, "{\"peak\": 5}", "{\"shoulder\": 5}")), ValidationError);
}

TEST(TariffLoad, MissingEnergyRateIsRejected) {
  EXPECT_THROW(parse_tariff_json(replace(kMinimal, ", \"off_peak\": 0.10", "")), ValidationError);
}

TEST(TariffLoad, NonPartitioningRulesAreRejected) {
  EXPECT_THROW(parse_tariff_json(replace(kMinimal, "[[0, 16], [21, 24]]", "[[0, 16]]")), ValidationError);
}

TEST(TariffLoad, MalformedJsonIsRejected) {
  EXPECT_THROW(parse_tariff_json("{\"id\": "), ValidationError);
  EXPECT_THROW(load_tariff("/nonexistent/tariff.json"), ValidationError);
}

TEST(TariffLoad, JsonRoundTrip) {
  const auto a = load_tariff(bundled("storage_option_s.json"));
  const auto b = parse_tariff_json(tariff_to_json(a));
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.dr_tou, b.dr_tou);
  EXPECT_EQ(a.er, b.er);
  EXPECT_EQ(a.calendar.periods(), b.calendar.periods());
  const auto grid = build_time_grid(2021, 7);
  EXPECT_EQ(period_series(a.calendar, grid), period_series(b.calendar, grid));
}

TEST(RateSeries, NetSurplusRate) {
  const auto t = parse_tariff_json(kMinimal);
  const auto grid = build_time_grid(2021, 6);
  const auto rs = rate_series(t, grid);
  EXPECT_NEAR(rs.nsr[17 * 4], 0.275, 1e-12);
  EXPECT_NEAR(rs.er[17 * 4], 0.30, 1e-12);
  EXPECT_NEAR(rs.nsr[3 * 4], 0.075, 1e-12);
}

TEST(RateSeries, ZeroNonBypassableGivesEqualSeries) {
  const auto t = flat_tariff(1, 1, 0.20, 0.0);
  const auto rs = rate_series(t, build_time_grid(2021, 2));
  EXPECT_EQ(rs.er, rs.nsr);
  for (double e : rs.er) EXPECT_DOUBLE_EQ(e, 0.20);
}

TEST(ComputeBill, FourStepToy) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 4);
  const std::vector<double> net{4, 8, -2, 0};
  const auto b = compute_bill(net, t, grid);
  EXPECT_NEAR(b.demand_max_charge, 80.0, 1e-12);
  EXPECT_NEAR(b.demand_tou_charges.at("all"), 40.0, 1e-12);
  EXPECT_NEAR(b.energy_charge, 0.60, 1e-12);
  EXPECT_NEAR(b.nem_credit, -0.09, 1e-12);
  EXPECT_NEAR(b.total, 120.51, 1e-9);
}

TEST(ComputeBill, AllZero) {
  const auto t = load_tariff(bundled("base_b19.json"));
  const auto grid = build_time_grid(2021, 3);
  const std::vector<double> net(grid.count(), 0.0);
  EXPECT_DOUBLE_EQ(compute_bill(net, t, grid).total, 0.0);
}

TEST(ComputeBill, PureExportClampsDemandCharges) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 96);
  const std::vector<double> net(96, -3.0);
  const auto b = compute_bill(net, t, grid);
  EXPECT_DOUBLE_EQ(b.demand_max_charge, 0.0);
  EXPECT_DOUBLE_EQ(b.demand_tou_charges.at("all"), 0.0);
  EXPECT_DOUBLE_EQ(b.energy_charge, 0.0);
  EXPECT_LT(b.nem_credit, 0.0);
  EXPECT_NEAR(b.nem_credit, 0.25 * 96 * -3.0 * 0.18, 1e-9);
}

TEST(ComputeBill, TouChargeUsesPeriodMaximum) {
  const auto t = load_tariff(bundled("base_b19.json"));
  const auto grid = build_time_grid(2021, 7);
  std::vector<double> net(grid.count(), 10.0);
  net[17 * 4] = 50.0;       // peak
  net[15 * 4] = 30.0;       // partial peak
  const auto b = compute_bill(net, t, grid);
  EXPECT_DOUBLE_EQ(b.d_max, 50.0);
  EXPECT_DOUBLE_EQ(b.d_tou.at("peak"), 50.0);
  EXPECT_DOUBLE_EQ(b.d_tou.at("partial_peak"), 30.0);
  EXPECT_DOUBLE_EQ(b.d_tou.at("off_peak"), 10.0);
  EXPECT_NEAR(b.demand_tou_charges.at("partial_peak"), 30.0 * t.tou_demand_rate("partial_peak"), 1e-9);
}

TEST(ComputeBill, LengthMismatchIsRejected) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const std::vector<double> net(3, 1.0);
  EXPECT_THROW(compute_bill(net, t, TimeGrid(2021, 1, 1, 4)), std::invalid_argument);
}
