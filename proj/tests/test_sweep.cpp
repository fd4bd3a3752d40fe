#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "flexbill/sweep.hpp"
#include "support/fixtures.hpp"

using namespace flexbill;
using flexbill::testing::bundled;

namespace {

struct Shared {
  YearData data;
  TariffSchedule base;
  TariffSchedule storage;
};

const Shared& shared() {
  static const Shared s = [] {
    const auto load = SeriesTable::read_csv(bundled("load_synthetic_2021.csv"));
    return Shared{make_year_data(2021, load, nullptr, 231.8), load_tariff(bundled("base_b19.json")),
                  load_tariff(bundled("storage_option_s.json"))};
  }();
  return s;
}

SweepConfig small_config(unsigned jobs) {
  SweepConfig c;
  c.recovery_hours = {2};
  c.flex_pct = {0.3, 0.0};
  c.power_ratio = {0.05, 0.2};
  c.duration_hours = {2};
  c.jobs = jobs;
  return c;
}

std::string csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_sweep_csv(rows, os);
  return os.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("flexbill_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(SweepConfig, DefaultsCoverThePublishedRanges) {
  const auto c = parse_sweep_config(R"({"load_csv": "l.csv", "base_tariff": "b.json", "storage_tariff": "s.json"})",
                                    "/data");
  EXPECT_EQ(c.recovery_hours.size() * c.flex_pct.size(), 66u);
  EXPECT_EQ(c.power_ratio.size() * c.duration_hours.size(), 60u);
  EXPECT_DOUBLE_EQ(c.flex_pct.back(), 1.0);
  EXPECT_DOUBLE_EQ(c.power_ratio.back(), 1.4);
  EXPECT_EQ(c.load_csv, std::filesystem::path("/data/l.csv"));
  EXPECT_TRUE(c.pv_csv.empty());
  EXPECT_DOUBLE_EQ(c.battery_defaults.eta, 0.85);
  EXPECT_DOUBLE_EQ(c.battery_defaults.j_init_fraction, 0.5);
  EXPECT_NO_THROW(validate(c));
}

TEST(SweepConfig, EmptyAxisDisablesFamily) {
  const auto c = parse_sweep_config(R"({"load_csv": "l.csv", "base_tariff": "/abs/b.json",
      "storage_tariff": "s.json", "battery": {"power_ratio": []}})",
                                    "cfg");
  EXPECT_FALSE(c.bes_enabled());
  EXPECT_TRUE(c.flex_enabled());
  EXPECT_EQ(c.base_tariff, std::filesystem::path("/abs/b.json"));
}

TEST(SweepConfig, InvalidValuesAreRejected) {
  const std::string head = R"({"load_csv": "l.csv", "base_tariff": "b.json", "storage_tariff": "s.json", )";
  EXPECT_THROW(validate(parse_sweep_config(head + R"("flex": {"flex_pct": [1.5]}})", ".")), ValidationError);
  EXPECT_THROW(validate(parse_sweep_config(head + R"("battery": {"duration_hours": [0]}})", ".")),
               ValidationError);
  EXPECT_THROW(validate(parse_sweep_config(
                   head + R"("flex": {"flex_pct": []}, "battery": {"power_ratio": []}})", ".")),
               ValidationError);
  EXPECT_THROW(parse_sweep_config(head + R"("jobs": 0})", "."), ValidationError);
  EXPECT_THROW(parse_sweep_config(R"({"base_tariff": "b.json"})", "."), ValidationError);
  EXPECT_THROW(parse_sweep_config("not json", "."), ValidationError);
  EXPECT_THROW(load_sweep_config("/nonexistent/config.json"), ValidationError);
}

TEST(SweepConfig, BundledExampleLoads) {
  const auto c = load_sweep_config(bundled("example.json"));
  EXPECT_NO_THROW(validate(c));
  EXPECT_TRUE(std::filesystem::exists(c.load_csv));
  EXPECT_TRUE(std::filesystem::exists(c.base_tariff));
  EXPECT_TRUE(std::filesystem::exists(c.storage_tariff));
}

TEST(RunAnnual, NoAssetBillEqualsOracle) {
  const auto& s = shared();
  const auto run = run_annual(AssetPoint{}, s.base, s.data);
  ASSERT_TRUE(run.ok()) << run.error;
  double oracle = 0.0;
  for (std::size_t m = 0; m < 12; ++m) {
    std::vector<double> net(s.data.d_base[m].size());
    for (std::size_t t = 0; t < net.size(); ++t) net[t] = s.data.d_base[m][t] - s.data.p_pv[m][t];
    EXPECT_EQ(run.result.months[m].d_net, net) << "month " << m + 1;
    oracle += compute_bill(net, s.base, s.data.grids[m]).total;
  }
  EXPECT_NEAR(run.result.annual_bill, oracle, 1e-9 * oracle);
  std::size_t steps = 0;
  for (const auto& g : s.data.grids) steps += g.count();
  EXPECT_EQ(run.result.d_net.size(), steps);
  EXPECT_EQ(steps, 8760u * 4u);
}

TEST(RunAnnual, FullFlexibilityLowersTheBill) {
  const auto& s = shared();
  AssetPoint flex{Family::Flex, 24.0, 1.0, 0.0, 0.0};
  const auto with = run_annual(flex, s.base, s.data);
  const auto without = run_annual(AssetPoint{}, s.base, s.data);
  ASSERT_TRUE(with.ok() && without.ok());
  EXPECT_LE(with.metrics.total_bill, without.metrics.total_bill);
  double sum = 0.0;
  for (const auto& m : with.result.months) sum += m.objective_value;
  EXPECT_NEAR(with.result.annual_bill, sum, 1e-6 * sum);
}

TEST(EvaluateSweep, RowLayoutAndRatios) {
  const auto& s = shared();
  const auto out = evaluate_sweep(small_config(1), s.data, s.base, s.storage);
  EXPECT_EQ(out.failed_points, 0u);
  ASSERT_EQ(out.flex_rows.size(), 6u);
  ASSERT_EQ(out.bes_rows.size(), 6u);
  // sorted axes: f = 0 first
  EXPECT_DOUBLE_EQ(out.flex_rows[0].point.flex_pct, 0.0);
  EXPECT_EQ(out.flex_rows[0].tariff_id, "base_b19");
  EXPECT_EQ(out.flex_rows[1].tariff_id, "storage_option_s");
  EXPECT_EQ(out.flex_rows[2].tariff_id, "ratio");
  for (const auto* rows : {&out.flex_rows, &out.bes_rows}) {
    for (std::size_t i = 0; i < rows->size(); i += 3) {
      const auto& b = (*rows)[i];
      const auto& st = (*rows)[i + 1];
      const auto& r = (*rows)[i + 2];
      ASSERT_TRUE(b.annual_bill && st.annual_bill && r.ratio_bill);
      EXPECT_NEAR(*r.ratio_bill, *st.annual_bill / *b.annual_bill, 1e-12);
      EXPECT_NEAR(*r.annual_bill, *st.annual_bill - *b.annual_bill, 1e-9);
      EXPECT_NEAR(*r.ratio_ramp, *st.mean_peak_ramp / *b.mean_peak_ramp, 1e-12);
    }
  }
  EXPECT_EQ(out.bes_rows[0].eligible, std::optional<bool>(false));
  EXPECT_EQ(out.bes_rows[3].eligible, std::optional<bool>(true));
  EXPECT_FALSE(out.flex_rows[0].eligible.has_value());
}

TEST(EvaluateSweep, ParallelMatchesSerial) {
  const auto& s = shared();
  const auto serial = evaluate_sweep(small_config(1), s.data, s.base, s.storage);
  const auto parallel = evaluate_sweep(small_config(3), s.data, s.base, s.storage);
  EXPECT_EQ(csv(serial.flex_rows), csv(parallel.flex_rows));
  EXPECT_EQ(csv(serial.bes_rows), csv(parallel.bes_rows));
  const auto again = evaluate_sweep(small_config(2), s.data, s.base, s.storage);
  EXPECT_EQ(csv(serial.bes_rows), csv(again.bes_rows));
}

TEST(EvaluateSweep, EligibilityEnforcement) {
  const auto& s = shared();
  auto c = small_config(2);
  c.recovery_hours.clear();
  c.enforce_eligibility = true;
  const auto out = evaluate_sweep(c, s.data, s.base, s.storage);
  ASSERT_EQ(out.bes_rows.size(), 6u);
  EXPECT_TRUE(out.flex_rows.empty());
  EXPECT_EQ(out.bes_rows[0].status, "ok");
  EXPECT_EQ(out.bes_rows[1].status, "ineligible");
  EXPECT_FALSE(out.bes_rows[1].annual_bill.has_value());
  EXPECT_EQ(out.bes_rows[2].status, "ineligible");
  EXPECT_EQ(out.bes_rows[4].status, "ok");
  EXPECT_EQ(out.failed_points, 0u);
}

TEST(SweepCsv, HeaderAndFormatting) {
  SweepRow row;
  row.family = Family::Bes;
  row.point = AssetPoint{Family::Bes, 0.0, 0.0, 0.3, 2.0};
  row.tariff_id = "ratio";
  row.ratio_bill = 1.23456789;
  row.annual_bill = -12.5;
  row.eligible = true;
  const auto text = csv({row});
  const auto nl = text.find('\n');
  EXPECT_EQ(text.substr(0, nl), kSweepCsvHeader);
  EXPECT_EQ(text.substr(nl + 1), "bes,,,0.3,2,ratio,-12.5,,,1.23457,undefined,undefined,true,ok\n");
}

TEST(RunSweep, WritesOutputsAndSkipsEmptyFamily) {
  auto c = small_config(2);
  c.load_csv = bundled("load_synthetic_2021.csv");
  c.base_tariff = bundled("base_b19.json");
  c.storage_tariff = bundled("storage_option_s.json");
  c.power_ratio.clear();
  c.flex_pct = {0.2};
  c.write_json = true;
  c.output_dir = scratch_dir("run_sweep");
  const auto out = run_sweep(c);
  EXPECT_EQ(out.failed_points, 0u);
  EXPECT_TRUE(std::filesystem::exists(c.output_dir / "flex_sweep.csv"));
  EXPECT_FALSE(std::filesystem::exists(c.output_dir / "bes_sweep.csv"));
  EXPECT_TRUE(std::filesystem::exists(c.output_dir / "run_manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(c.output_dir / "sweep_results.json"));
  std::ifstream f(c.output_dir / "flex_sweep.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), csv(out.flex_rows));
}

TEST(Hashing, Fnv1a) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}
