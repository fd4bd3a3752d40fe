#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "flexbill/lp.hpp"
#include "support/enumeration.hpp"
#include "support/fixtures.hpp"
#include "support/toy_cases.hpp"

using namespace flexbill;
using namespace flexbill::testing;

namespace {

TariffSchedule three_period_tariff() {
  TouCalendar cal({"peak", "partial_peak", "off_peak"},
                  {TouRule{"peak", {}, DayClass::All, {{16, 21}}},
                   TouRule{"partial_peak", {}, DayClass::All, {{14, 16}, {21, 23}}},
                   TouRule{"off_peak", {}, DayClass::All, {{0, 14}, {23, 24}}}});
  TariffSchedule t{"three", 15.0, {10.0, 3.0, 1.0}, {0.30, 0.18, 0.12}, 0.025, cal};
  validate(t);
  return t;
}

MonthInputs january(std::optional<BatterySpec> battery, std::optional<FlexSpec> flex) {
  std::mt19937_64 rng(11);
  const auto grid = build_time_grid(2021, 1);
  return {grid, random_load(rng, grid.count(), 120.0), synth_pv(150.0, grid).p_pv, battery, flex};
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(BuildLp, NoAssetVariableCount) {
  const auto lp = build_lp(january(std::nullopt, std::nullopt), three_period_tariff());
  EXPECT_EQ(lp.col_count(), 5956u);
  EXPECT_EQ(lp.layout.count(), 5956u);
}

TEST(BuildLp, BothAssetsVariableCount) {
  const auto lp = build_lp(january(BatterySpec{30, 120, 0.85, 60}, FlexSpec{0.4, 6}), three_period_tariff());
  EXPECT_EQ(lp.col_count(), 6u * 2976u + 1u + 3u);
}

TEST(BuildLp, RollingWindowRowCount) {
  const auto lp = build_lp(january(std::nullopt, FlexSpec{0.5, 24.0}), three_period_tariff());
  EXPECT_EQ(lp.rows_tagged(EqTag::RollingWindow), 2881u);
  EXPECT_EQ(lp.rows_tagged(EqTag::HorizonBalance), 1u);
  EXPECT_EQ(lp.col_count(), 3u * 2976u + 4u);
}

TEST(BuildLp, AbsentBatteryHasNoBatteryRows) {
  const auto lp = build_lp(january(std::nullopt, FlexSpec{0.5, 4.0}), three_period_tariff());
  for (int tag = 9; tag <= 15; ++tag) {
    EXPECT_EQ(lp.rows_tagged(static_cast<EqTag>(tag)), 0u) << "eq" << tag;
  }
  const auto zero_bpr = build_lp(january(BatterySpec{0, 0, 0.85, 0}, std::nullopt), three_period_tariff());
  EXPECT_EQ(zero_bpr.col_count(), 5956u);
}

TEST(BuildLp, ZeroFlexHasNoFlexRows) {
  const auto lp = build_lp(january(std::nullopt, FlexSpec{0.0, 4.0}), three_period_tariff());
  EXPECT_EQ(lp.rows_tagged(EqTag::RollingWindow), 0u);
  EXPECT_EQ(lp.rows_tagged(EqTag::HorizonBalance), 0u);
  EXPECT_EQ(lp.col_count(), 5956u);
}

TEST(BuildLp, EveryRowIsTagged) {
  const auto lp = build_lp(january(BatterySpec{30, 120, 0.85, 60}, FlexSpec{0.4, 6}), three_period_tariff());
  ASSERT_EQ(lp.row_tag.size(), lp.row_count());
  for (auto tag : lp.row_tag) {
    const int v = static_cast<int>(tag);
    EXPECT_GE(v, 2);
    EXPECT_LE(v, 16);
  }
  const std::size_t n = 2976;
  EXPECT_EQ(lp.rows_tagged(EqTag::NetDemand), n);
  EXPECT_EQ(lp.rows_tagged(EqTag::MaxDemand), n);
  EXPECT_EQ(lp.rows_tagged(EqTag::TouDemand), n);
  EXPECT_EQ(lp.rows_tagged(EqTag::SocInitial), 1u);
  EXPECT_EQ(lp.rows_tagged(EqTag::SocUpdate), n - 1);
  EXPECT_EQ(lp.rows_tagged(EqTag::SocFinal), 1u);
  EXPECT_EQ(lp.rows_tagged(EqTag::NoExport), n);
  EXPECT_EQ(eq_label(EqTag::RollingWindow), "eq7");
}

TEST(BuildLp, ObjectiveUsesQuarterHourFactors) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 4);
  const auto lp = build_lp(MonthInputs{grid, {1, 1, 1, 1}, {0, 0, 0, 0}, {}, {}}, t);
  const auto& L = lp.layout;
  EXPECT_NEAR(lp.cost[L.d_net(0)], 0.25 * 0.18, 1e-15);
  EXPECT_NEAR(lp.cost[L.d_pos(0)], 0.25 * 0.02, 1e-15);
  EXPECT_DOUBLE_EQ(lp.cost[L.d_max()], 10.0);
  EXPECT_DOUBLE_EQ(lp.cost[L.d_tou(0)], 5.0);
}

TEST(BuildLp, RejectsBadInputs) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 8);
  EXPECT_THROW(build_lp(MonthInputs{grid, std::vector<double>(7, 1.0), std::vector<double>(8, 0.0), {}, {}}, t),
               std::invalid_argument);
  EXPECT_THROW(build_lp(MonthInputs{grid, std::vector<double>(8, 1.0), std::vector<double>(8, 0.0), {},
                                    FlexSpec{0.5, 3.0}},
                        t),
               std::invalid_argument);
}

TEST(SolveLp, FlatLoadClosedForm) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 96);
  const MonthInputs in{grid, std::vector<double>(96, 10.0), std::vector<double>(96, 0.0), {}, {}};
  const auto sol = solve_lp(build_lp(in, t));
  ASSERT_TRUE(sol.optimal()) << sol.detail;
  EXPECT_NEAR(sol.objective_value, 198.0, 1e-9);
  EXPECT_NEAR(sol.d_max, 10.0, 1e-9);
}

TEST(SolveLp, NoAssetsReproducesNetLoadExactly) {
  const auto in = january(std::nullopt, std::nullopt);
  const auto t = load_tariff(bundled("base_b19.json"));
  const auto sol = solve_lp(build_lp(in, t));
  ASSERT_TRUE(sol.optimal());
  for (std::size_t i = 0; i < in.d_base.size(); ++i) {
    ASSERT_EQ(sol.d_net[i], in.d_base[i] - in.p_pv[i]) << "step " << i;
  }
  const auto bill = compute_bill(sol.d_net, t, in.grid);
  EXPECT_LE(relative_gap(bill.total, sol.objective_value), 1e-9);
}

TEST(SolveLp, EightStepToyMatchesEnumeration) {
  const auto tariff = two_period_tariff(12.0, 6.0, 2.0, 0.32, 0.14, 0.025);
  const auto toy = make_toy_flex_case(40.0, {0, 5, 10, 30, 45, 50, 20, 5}, 0.5, 4, tariff);
  const auto sol = solve_lp(build_lp(toy.inputs, toy.tariff));
  ASSERT_TRUE(sol.optimal());
  const auto grid_min = enumerate_minimum(toy.problem);
  EXPECT_LE(sol.objective_value, grid_min.best + 1e-6);
  EXPECT_GE(sol.objective_value, grid_min.best - toy.problem.gap_bound() - 1e-6);
  EXPECT_TRUE(verify_solution(sol, toy.inputs, toy.tariff).passed());
}

TEST(Enumeration, BranchAndBoundAgreesWithNaiveSearch) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 4; ++i) {
    const auto toy = random_toy_flex_case(rng, 0.15, i % 2 ? 2 : 4);
    EXPECT_NEAR(enumerate_minimum(toy.problem).best, naive_minimum(toy.problem), 1e-9);
  }
}

TEST(SolveLp, RandomToysBracketEnumeration) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 6; ++i) {
    const double f = i % 3 == 0 ? 0.25 : 0.5;
    const auto toy = random_toy_flex_case(rng, f, i % 2 ? 2 : 4);
    const auto sol = solve_lp(build_lp(toy.inputs, toy.tariff));
    ASSERT_TRUE(sol.optimal());
    const auto grid_min = enumerate_minimum(toy.problem).best;
    EXPECT_LE(sol.objective_value, grid_min + 1e-6) << "instance " << i;
    EXPECT_GE(sol.objective_value, grid_min - toy.problem.gap_bound() - 1e-6) << "instance " << i;
  }
}

TEST(SolveLp, AssetsNeverRaiseTheBill) {
  const auto t = load_tariff(bundled("base_b19.json"));
  const auto none = solve_lp(build_lp(january(std::nullopt, std::nullopt), t));
  const auto flex = solve_lp(build_lp(january(std::nullopt, FlexSpec{0.3, 4}), t));
  const auto bes = solve_lp(build_lp(january(BatterySpec{30, 60, 0.85, 30}, std::nullopt), t));
  const auto both = solve_lp(build_lp(january(BatterySpec{30, 60, 0.85, 30}, FlexSpec{0.3, 4}), t));
  ASSERT_TRUE(none.optimal() && flex.optimal() && bes.optimal() && both.optimal());
  EXPECT_LE(flex.objective_value, none.objective_value + 1e-6);
  EXPECT_LE(bes.objective_value, none.objective_value + 1e-6);
  EXPECT_LE(both.objective_value, std::min(flex.objective_value, bes.objective_value) + 1e-6);
}

TEST(SolveLp, DeterministicAcrossRuns) {
  const auto in = january(BatterySpec{30, 90, 0.85, 45}, FlexSpec{0.5, 12});
  const auto t = load_tariff(bundled("storage_option_s.json"));
  const auto lp = build_lp(in, t);
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  ASSERT_TRUE(a.optimal());
  EXPECT_EQ(a.objective_value, b.objective_value);
  EXPECT_EQ(a.d_net, b.d_net);
  EXPECT_EQ(a.soc, b.soc);
}

TEST(SolveLp, TightnessReportsActiveMaxDemandRows) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 8);
  const MonthInputs in{grid, {1, 2, 7, 3, 7, 1, 0, 2}, std::vector<double>(8, 0.0), {}, {}};
  const auto sol = solve_lp(build_lp(in, t));
  ASSERT_TRUE(sol.optimal());
  EXPECT_EQ(sol.tightness.max_active_steps, (std::vector<std::size_t>{2, 4}));
  ASSERT_EQ(sol.tightness.tou_active_count.size(), 1u);
  EXPECT_EQ(sol.tightness.tou_active_count[0], 2u);
}

TEST(SolveLp, BatteryShavesAPeak) {
  // 1 kW everywhere except a 2-step 11 kW spike; a 5 kW / 10 kWh battery with
  // lossless charging can take the spike down by 5 kW.
  const auto t = flat_tariff(10, 0.0, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 96);
  std::vector<double> load(96, 1.0);
  load[70] = load[71] = 11.0;
  const MonthInputs in{grid, load, std::vector<double>(96, 0.0), BatterySpec{5, 10, 1.0, 5}, {}};
  const auto sol = solve_lp(build_lp(in, t));
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.d_max, 6.0, 1e-6);
  const auto rep = verify_solution(sol, in, t);
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(sol.soc.back(), 5.0, 1e-6);
}

TEST(VerifySolution, OptimalSolutionPasses) {
  const auto in = january(BatterySpec{40, 160, 0.85, 80}, FlexSpec{0.6, 12});
  const auto t = load_tariff(bundled("storage_option_s.json"));
  const auto sol = solve_lp(build_lp(in, t));
  ASSERT_TRUE(sol.optimal());
  const auto rep = verify_solution(sol, in, t);
  EXPECT_TRUE(rep.passed()) << (rep.failures.empty() ? "" : rep.failures.front());
  for (const auto& [tag, r] : rep.max_residual) EXPECT_LE(r, 1e-6) << eq_label(tag);
  EXPECT_LE(rep.oracle_gap, kObjectiveRelTol);
}

TEST(VerifySolution, OracleMatchesObjectiveWithPositiveRates) {
  const auto in = january(BatterySpec{20, 40, 0.9, 10}, FlexSpec{0.2, 2});
  const auto t = three_period_tariff();
  ASSERT_TRUE(t.all_demand_rates_positive());
  const auto sol = solve_lp(build_lp(in, t));
  const auto rep = verify_solution(sol, in, t);
  EXPECT_TRUE(rep.oracle_applicable);
  EXPECT_LE(std::abs(rep.oracle_bill - sol.objective_value), 1e-6 * std::max(1.0, sol.objective_value));
}

TEST(VerifySolution, InjectedBalanceViolationFails) {
  const auto in = january(std::nullopt, FlexSpec{0.5, 8});
  const auto t = three_period_tariff();
  auto sol = solve_lp(build_lp(in, t));
  ASSERT_TRUE(sol.optimal());
  // shift a step's deviation by 0.5 kW and keep the identity consistent
  sol.d_dev[100] += 0.5;
  sol.d_net[100] += 0.5;
  sol.d_net_pos[100] = std::max(sol.d_net_pos[100], sol.d_net[100]);
  sol.d_max = std::max(sol.d_max, sol.d_net[100]);
  for (auto& v : sol.d_tou) v = std::max(v, sol.d_net[100]);
  const auto rep = verify_solution(sol, in, t);
  EXPECT_NEAR(rep.max_residual.at(EqTag::HorizonBalance), 0.5, 1e-6);
  EXPECT_FALSE(rep.passed());
}

TEST(VerifySolution, InjectedExportFails) {
  const TimeGrid grid(2021, 1, 1, 8);
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const MonthInputs in{grid, std::vector<double>(8, 2.0), std::vector<double>(8, 0.0),
                       BatterySpec{5, 10, 0.85, 5}, {}};
  auto sol = solve_lp(build_lp(in, t));
  ASSERT_TRUE(sol.optimal());
  sol.p_dis[3] += 4.0;
  sol.d_net[3] -= 4.0;
  sol.soc[3] -= 1.0;
  const auto rep = verify_solution(sol, in, t);
  EXPECT_GT(rep.max_residual.at(EqTag::NoExport), 1.0);
  EXPECT_FALSE(rep.passed());
}

TEST(VerifySolution, NonOptimalStatusFails) {
  DispatchSolution sol;
  sol.status = SolveStatus::Infeasible;
  const auto rep = verify_solution(sol, january(std::nullopt, std::nullopt), three_period_tariff());
  EXPECT_FALSE(rep.passed());
}

TEST(LpFormat, WritesLabelledRows) {
  const auto t = flat_tariff(10, 5, 0.20, 0.02);
  const TimeGrid grid(2021, 1, 1, 8);
  const MonthInputs in{grid, std::vector<double>(8, 2.0), std::vector<double>(8, 0.5),
                       BatterySpec{5, 10, 0.85, 5}, FlexSpec{0.5, 0.5}};
  std::ostringstream os;
  write_lp_format(build_lp(in, t), os);
  const auto text = os.str();
  for (const char* needle : {"Minimize", "Subject To", "eq7_0:", "eq8_0:", "eq9_0:", "eq15_7:",
                             "eq16_0:", "Bounds", "End"}) {
    EXPECT_NE(text.find(needle), std::string::npos) << needle;
  }
}
