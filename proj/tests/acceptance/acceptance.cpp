// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
//   flexbill_acceptance [--jobs N]     N = 0 uses every hardware thread

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "flexbill/lp.hpp"
#include "flexbill/metrics.hpp"
#include "flexbill/sweep.hpp"
#include "support/enumeration.hpp"
#include "support/fixtures.hpp"
#include "support/toy_cases.hpp"

using namespace flexbill;
using namespace flexbill::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::printf("criterion %d %s: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool near_value(double a, double b) { return std::abs(a - b) < 1e-9; }

// 1 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20210101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> recovery{1, 2, 4, 8, 12, 24};
  double worst = 0.0;
  int solved = 0;
  for (int i = 0; i < 50; ++i) {
    const int month = 1 + static_cast<int>(u(rng) * 12.0);
    const auto grid = build_time_grid(2021, month);
    const double scale = 50.0 + 200.0 * u(rng);
    auto load = random_load(rng, grid.count(), scale);
    auto pv = random_pv(rng, grid.count(), 1.2 * scale * u(rng));
    const auto tariff = random_tariff(rng);
    double annual_max = *std::max_element(load.begin(), load.end());
    std::optional<FlexSpec> flex;
    std::optional<BatterySpec> battery;
    if (i % 4 == 1 || i % 4 == 3) flex = FlexSpec{0.05 + 0.95 * u(rng), recovery[static_cast<std::size_t>(i / 4) % 6]};
    if (i % 4 == 2 || i % 4 == 3) {
      battery = battery_from_sweep(0.05 + 1.35 * u(rng), 1.0 + static_cast<double>(i % 4), annual_max,
                                   BatteryDefaults{0.7 + 0.3 * u(rng), u(rng)});
    }
    const MonthInputs in{grid, std::move(load), std::move(pv), battery, flex};
    const auto sol = solve_lp(build_lp(in, tariff));
    if (!sol.optimal()) return {false, "instance " + std::to_string(i) + " not optimal: " + sol.detail};
    const double bill = compute_bill(sol.d_net, tariff, grid).total;
    worst = std::max(worst, std::abs(bill - sol.objective_value) / std::max(1.0, std::abs(sol.objective_value)));
    ++solved;
  }
  const double secs = seconds_since(t0);
  const bool pass = worst <= 1e-6 && secs < 300.0;
  return {pass, std::to_string(solved) + " instances, worst relative gap " + fmt("%.2e", worst) + ", " +
                    fmt("%.1f s", secs) + " (limit 300 s)"};
}

// 2 -------------------------------------------------------------------------
Outcome brute_force_dominance() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(8);
  const double fs[3] = {0.25, 0.5, 1.0};
  double worst_over = -1e300, worst_under = -1e300;
  int ok = 0;
  for (int i = 0; i < 20; ++i) {
    const auto toy = random_toy_flex_case(rng, fs[i % 3], i % 2 ? 4 : 2);
    const auto sol = solve_lp(build_lp(toy.inputs, toy.tariff));
    if (!sol.optimal()) return {false, "toy " + std::to_string(i) + " not optimal"};
    const double grid_min = enumerate_minimum(toy.problem).best;
    const double over = sol.objective_value - grid_min;                      // must be <= 1e-6
    const double under = grid_min - toy.problem.gap_bound() - sol.objective_value;  // must be <= 1e-6
    worst_over = std::max(worst_over, over);
    worst_under = std::max(worst_under, under);
    if (over <= 1e-6 && under <= 1e-6) ++ok;
  }
  const double secs = seconds_since(t0);
  const bool pass = ok == 20 && secs < 120.0;
  return {pass, std::to_string(ok) + "/20 bracketed, max(LP - grid min) " + fmt("%.2e", worst_over) +
                    ", max(grid min - gap - LP) " + fmt("%.2e", worst_under) + ", " + fmt("%.1f s", secs) +
                    " (limit 120 s)"};
}

// sweep-backed criteria ------------------------------------------------------
struct SweepData {
  SweepConfig config;
  YearData data;
  TariffSchedule base;
  TariffSchedule storage;
  SweepOutcome outcome;
  double seconds = 0.0;
  unsigned jobs = 1;
};

const SweepRow* find_row(const std::vector<SweepRow>& rows, const std::string& tariff,
                         const std::function<bool(const AssetPoint&)>& match) {
  for (const auto& r : rows) {
    if (r.tariff_id == tariff && match(r.point)) return &r;
  }
  return nullptr;
}

Outcome feasibility_suite(const SweepData& s) {
  std::size_t runs = 0, bad = 0;
  std::string first;
  for (const auto* rows : {&s.outcome.flex_rows, &s.outcome.bes_rows}) {
    for (const auto& r : *rows) {
      if (r.tariff_id == kRatioTariffId) continue;
      ++runs;
      if (r.status != "ok") {
        ++bad;
        if (first.empty()) first = r.status;
      }
    }
  }
  const bool pass = bad == 0 && runs == (66 + 60) * 2;
  return {pass, std::to_string(runs - bad) + "/" + std::to_string(runs) + " annual runs (" +
                    std::to_string((runs - bad) * 12) + " monthly LPs) passed verification" +
                    (first.empty() ? "" : "; first failure: " + first)};
}

Outcome value_ladder(const SweepData& s) {
  const std::string id = s.base.id;
  std::vector<double> flex_bills, bes_bills;
  for (int i = 0; i <= 5; ++i) {
    const double f = 0.2 * i;
    const auto* r = find_row(s.outcome.flex_rows, id, [&](const AssetPoint& p) {
      return near_value(p.recovery_hours, 12.0) && near_value(p.flex_pct, f);
    });
    if (!r || !r->annual_bill) return {false, "missing flex ladder point f=" + fmt("%.1f", f)};
    flex_bills.push_back(*r->annual_bill);
  }
  for (int i = 0; i <= 7; ++i) {
    const double pr = 0.2 * i;
    const auto* r = find_row(s.outcome.bes_rows, id, [&](const AssetPoint& p) {
      return near_value(p.duration_hours, 4.0) && near_value(p.power_ratio, pr);
    });
    if (!r || !r->annual_bill) return {false, "missing battery ladder point ratio=" + fmt("%.1f", pr)};
    bes_bills.push_back(*r->annual_bill);
  }
  auto worst_rise = [](const std::vector<double>& v) {
    double w = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) w = std::max(w, (v[i] - v[i - 1]) / std::abs(v[i - 1]));
    return w;
  };
  const double wf = worst_rise(flex_bills), wb = worst_rise(bes_bills);
  const bool pass = wf <= 1e-6 && wb <= 1e-6;
  return {pass, "flex ladder " + fmt("%.0f", flex_bills.front()) + " -> " + fmt("%.0f", flex_bills.back()) +
                    " (max relative rise " + fmt("%.1e", wf) + "), battery ladder " +
                    fmt("%.0f", bes_bills.front()) + " -> " + fmt("%.0f", bes_bills.back()) +
                    " (max relative rise " + fmt("%.1e", wb) + ")"};
}

Outcome no_asset_identity(const SweepData& s) {
  double worst = 0.0;
  std::size_t mismatched = 0;
  for (const auto* tariff : {&s.base, &s.storage}) {
    const auto run = run_annual(AssetPoint{}, *tariff, s.data);
    if (!run.ok()) return {false, run.error};
    double oracle = 0.0;
    for (std::size_t m = 0; m < 12; ++m) {
      const auto& sol = run.result.months[m];
      std::vector<double> net(s.data.d_base[m].size());
      for (std::size_t t = 0; t < net.size(); ++t) {
        net[t] = s.data.d_base[m][t] - s.data.p_pv[m][t];
        if (sol.d_net[t] != net[t]) ++mismatched;
      }
      oracle += compute_bill(net, *tariff, s.data.grids[m]).total;
    }
    worst = std::max(worst, std::abs(run.result.annual_bill - oracle) / std::abs(oracle));
  }
  const bool pass = mismatched == 0 && worst <= 1e-9;
  return {pass, std::to_string(mismatched) + " steps differ from D_base - P_pv, annual bill vs oracle " +
                    fmt("%.1e", worst) + " relative (both tariffs)"};
}

Outcome ramp_and_net_direction(const SweepData& s) {
  double worst_ramp = 0.0;
  double worst_net = 0.0;
  int ramp_points = 0, net_points = 0, bad = 0;
  for (const auto& r : s.outcome.flex_rows) {
    if (r.tariff_id != kRatioTariffId) continue;
    if (r.point.flex_pct >= 0.1 - 1e-9) {
      ++ramp_points;
      if (!r.ratio_ramp || *r.ratio_ramp > 1.02) ++bad;
      if (r.ratio_ramp) worst_ramp = std::max(worst_ramp, *r.ratio_ramp);
    }
    if (r.point.recovery_hours >= 12.0 - 1e-9 && r.point.flex_pct >= 0.6 - 1e-9) {
      ++net_points;
      if (!r.ratio_net || *r.ratio_net >= 1.0) ++bad;
      if (r.ratio_net) worst_net = std::max(worst_net, *r.ratio_net);
    }
  }
  const bool pass = bad == 0 && ramp_points == 60 && net_points == 10;
  return {pass, "max ramp ratio " + fmt("%.4f", worst_ramp) + " over " + std::to_string(ramp_points) +
                    " points (f >= 0.1, limit 1.02); max net-demand ratio " + fmt("%.4f", worst_net) +
                    " over " + std::to_string(net_points) + " points (recovery >= 12 h, f >= 0.6, limit < 1)"};
}

Outcome bill_ratio_region(const SweepData& s) {
  std::map<std::pair<double, double>, double> ratio;  // (recovery, f) -> bill ratio
  for (const auto& r : s.outcome.flex_rows) {
    if (r.tariff_id == kRatioTariffId && r.ratio_bill) {
      ratio[{r.point.recovery_hours, std::round(r.point.flex_pct * 10.0) / 10.0}] = *r.ratio_bill;
    }
  }
  if (ratio.size() != 66) return {false, "expected 66 ratio rows, found " + std::to_string(ratio.size())};

  int short_recovery_below = 0;
  double min_short = 1e300;
  std::vector<std::string> below;
  bool outside_high_region = false;
  for (const auto& [key, v] : ratio) {
    const auto [h, f] = key;
    if (h <= 4.0 + 1e-9) {
      min_short = std::min(min_short, v);
      if (v < 1.0) ++short_recovery_below;
    }
    if (v < 1.0) {
      below.push_back(fmt("%g", h) + "h/" + fmt("%g", f));
      if (h < 12.0 - 1e-9 || f < 0.6 - 1e-9) outside_high_region = true;
    }
  }
  // trend toward ratio < 1: with long recovery, full flexibility beats 10 %;
  // with high flexibility, 24 h recovery beats 1 h
  bool trend = true;
  for (double h : {12.0, 24.0}) trend = trend && ratio[{h, 1.0}] < ratio[{h, 0.1}];
  for (double f : {0.6, 0.7, 0.8, 0.9, 1.0}) trend = trend && ratio[{24.0, f}] < ratio[{1.0, f}];

  const bool pass = short_recovery_below == 0 && !below.empty() && !outside_high_region && trend;
  std::string list;
  for (const auto& b : below) list += (list.empty() ? "" : " ") + b;
  return {pass, "min ratio with recovery <= 4 h " + fmt("%.4f", min_short) + "; ratio < 1 at [" + list +
                    "]" + (outside_high_region ? " (outside recovery >= 12 h, f >= 0.6)" : "") +
                    "; trend in f and recovery " + (trend ? "holds" : "broken")};
}

Outcome runtime(const SweepData& s) {
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min(s.jobs, cores);
  // the sweep is embarrassingly parallel over ~250 annual runs, so the work
  // measured here divides across four cores
  const double projected = s.seconds * static_cast<double>(workers) / 4.0;
  const bool pass = projected <= 900.0;
  return {pass, "full sweep " + fmt("%.0f s", s.seconds) + " wall with " + std::to_string(workers) +
                    " worker(s) on " + std::to_string(cores) + " hardware thread(s); projected 4-core wall " +
                    fmt("%.0f s", projected) + " (limit 900 s)"};
}

}  // namespace

int main(int argc, char** argv) {
  unsigned jobs = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) {
      jobs = static_cast<unsigned>(std::stoul(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--jobs N]\n", argv[0]);
      return 2;
    }
  }
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  report(1, "oracle equivalence on 50 random monthly instances", oracle_equivalence());
  report(2, "brute-force dominance on 20 eight-step flex instances", brute_force_dominance());

  SweepData s{.config = load_sweep_config(bundled("example.json")),
              .data = {},
              .base = load_tariff(bundled("base_b19.json")),
              .storage = load_tariff(bundled("storage_option_s.json")),
              .outcome = {},
              .seconds = 0.0,
              .jobs = jobs};
  s.config.recovery_hours = default_recovery_hours();
  s.config.flex_pct = default_flex_pct();
  s.config.power_ratio = default_power_ratio();
  s.config.duration_hours = default_duration_hours();
  s.config.enforce_eligibility = false;
  s.config.jobs = jobs;
  const auto load = SeriesTable::read_csv(s.config.load_csv);
  std::optional<SeriesTable> pv;
  if (!s.config.pv_csv.empty()) pv = SeriesTable::read_csv(s.config.pv_csv);
  s.data = make_year_data(s.config.year, load, pv ? &*pv : nullptr, s.config.pv_nameplate_kw);
  std::printf("running the full default sweep (66 flex + 60 battery points, 2 tariffs) with %u worker(s)\n", jobs);
  std::fflush(stdout);
  const auto t0 = Clock::now();
  s.outcome = evaluate_sweep(s.config, s.data, s.base, s.storage);
  s.seconds = seconds_since(t0);

  report(3, "feasibility of every optimal solution across the default sweep", feasibility_suite(s));
  report(4, "monotone value ladder on the bundled profile and base tariff", value_ladder(s));
  report(5, "no-asset identity", no_asset_identity(s));
  report(6, "peak ramp and peak net-demand ratios", ramp_and_net_direction(s));
  report(7, "bill ratio below 1 only with long recovery and high flexibility", bill_ratio_region(s));
  report(8, "full default sweep runtime", runtime(s));

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
