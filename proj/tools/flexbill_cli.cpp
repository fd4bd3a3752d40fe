// flexbill command-line interface.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 solver/verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "flexbill/assets.hpp"
#include "flexbill/lp.hpp"
#include "flexbill/metrics.hpp"
#include "flexbill/sweep.hpp"
#include "flexbill/tariff.hpp"

using namespace flexbill;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitSolve = 2;

struct SolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssetFlags {
  double flex_pct = 0.0;
  double recovery_hours = 12.0;
  double power_ratio = 0.0;
  double duration_hours = 4.0;
  std::string tariff = "base";
};

void add_asset_flags(CLI::App* cmd, AssetFlags& a) {
  cmd->add_option("--tariff", a.tariff, "base, storage, or a tariff JSON path")->capture_default_str();
  cmd->add_option("--flex-pct", a.flex_pct, "flexible share of base demand, 0..1")->capture_default_str();
  cmd->add_option("--recovery-hours", a.recovery_hours, "demand recovery window (h)")->capture_default_str();
  cmd->add_option("--power-ratio", a.power_ratio, "battery power / annual max demand")->capture_default_str();
  cmd->add_option("--duration-hours", a.duration_hours, "battery energy / power (h)")->capture_default_str();
}

struct Loaded {
  SweepConfig config;
  YearData data;
  TariffSchedule tariff;
  AssetPoint point;
};

Loaded load_inputs(const std::string& config_path, const AssetFlags& a) {
  auto config = load_sweep_config(config_path);
  auto tariff = a.tariff == "base"      ? load_tariff(config.base_tariff)
                : a.tariff == "storage" ? load_tariff(config.storage_tariff)
                                        : load_tariff(a.tariff);
  const auto load = SeriesTable::read_csv(config.load_csv);
  std::optional<SeriesTable> pv;
  if (!config.pv_csv.empty()) pv = SeriesTable::read_csv(config.pv_csv);
  auto data = make_year_data(config.year, load, pv ? &*pv : nullptr, config.pv_nameplate_kw);

  AssetPoint point;
  point.flex_pct = a.flex_pct;
  point.recovery_hours = a.recovery_hours;
  point.power_ratio = a.power_ratio;
  point.duration_hours = a.duration_hours;
  point.family = a.power_ratio > 0.0 ? Family::Bes : a.flex_pct > 0.0 ? Family::Flex : Family::None;
  if (auto f = point.flex()) validate(*f);
  if (auto b = point.battery(data.annual_max, config.battery_defaults)) validate(*b);
  return {std::move(config), std::move(data), std::move(tariff), point};
}

MonthInputs month_inputs(const Loaded& in, int month) {
  if (month < 1 || month > 12) throw ValidationError("--month must be in 1..12");
  const auto m = static_cast<std::size_t>(month - 1);
  return {in.data.grids[m], in.data.d_base[m], in.data.p_pv[m],
          in.point.battery(in.data.annual_max, in.config.battery_defaults), in.point.flex()};
}

void print_bill(const BillBreakdown& b) {
  std::printf("  demand (max)       %12.2f  (D_max %.3f kW)\n", b.demand_max_charge, b.d_max);
  for (const auto& [period, charge] : b.demand_tou_charges) {
    std::printf("  demand %-12s %12.2f  (%.3f kW)\n", period.c_str(), charge, b.d_tou.at(period));
  }
  std::printf("  energy             %12.2f\n", b.energy_charge);
  std::printf("  nem credit         %12.2f\n", b.nem_credit);
  std::printf("  total              %12.2f\n", b.total);
}

int cmd_validate_tariff(const std::string& path) {
  const auto t = load_tariff(path);
  std::printf("%s: ok (%zu periods, demand_rate_max %.4g $/kW, nbc %.4g $/kWh)\n", t.id.c_str(),
              t.calendar.period_count(), t.dr_max, t.nbc);
  return kExitOk;
}

int cmd_solve(const std::string& config, int month, const AssetFlags& a) {
  const auto in = load_inputs(config, a);
  const auto inputs = month_inputs(in, month);
  const auto lp = build_lp(inputs, in.tariff);
  const auto sol = solve_lp(lp);
  if (!sol.optimal()) throw SolveFailure("solver status " + to_string(sol.status) + " (" + sol.detail + ")");
  const auto report = verify_solution(sol, inputs, in.tariff);
  std::printf("%s, %04d-%02d, %s: %zu columns, %zu rows\n", in.tariff.id.c_str(), in.data.year, month,
              in.point.label().c_str(), lp.col_count(), lp.row_count());
  std::printf("  objective          %12.2f\n", sol.objective_value);
  print_bill(compute_bill(sol.d_net, in.tariff, inputs.grid));
  if (!report.passed()) throw SolveFailure("verification failed: " + report.failures.front());
  std::printf("  verification: pass (oracle gap %.3g)\n", report.oracle_gap);
  return kExitOk;
}

int cmd_annual(const std::string& config, const AssetFlags& a) {
  const auto in = load_inputs(config, a);
  const auto run = run_annual(in.point, in.tariff, in.data, in.config.battery_defaults);
  for (std::size_t m = 0; m < run.result.months.size(); ++m) {
    const auto& rep = run.result.reports[m];
    double worst = 0.0;
    for (const auto& [tag, r] : rep.max_residual) worst = std::max(worst, r);
    std::printf("month %2d: verification pass  bill %10.2f  max residual %.2e  oracle gap %.2e\n",
                run.result.grids[m].month(), run.result.months[m].objective_value, worst, rep.oracle_gap);
  }
  if (!run.ok()) throw SolveFailure(run.error);
  std::printf("%s, %s: annual bill %.2f, mean peak ramp %.4f kW/step, mean peak net demand %.4f kW\n",
              in.tariff.id.c_str(), in.point.label().c_str(), run.metrics.total_bill,
              run.metrics.mean_peak_ramp, run.metrics.mean_peak_net_demand);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int jobs) {
  auto config = load_sweep_config(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (jobs > 0) config.jobs = static_cast<unsigned>(jobs);
  const auto outcome = run_sweep(config);
  std::printf("wrote %zu flex rows, %zu bes rows to %s (%zu failed points)\n", outcome.flex_rows.size(),
              outcome.bes_rows.size(), config.output_dir.string().c_str(), outcome.failed_points);
  return outcome.failed_points == 0 ? kExitOk : kExitSolve;
}

int cmd_dump_lp(const std::string& config, int month, const AssetFlags& a, const std::string& out) {
  const auto in = load_inputs(config, a);
  const auto lp = build_lp(month_inputs(in, month), in.tariff);
  if (out.empty() || out == "-") {
    write_lp_format(lp, std::cout);
  } else {
    std::ofstream f(out);
    if (!f) throw ValidationError("cannot write " + out);
    write_lp_format(lp, f);
    std::printf("wrote %s (%zu columns, %zu rows)\n", out.c_str(), lp.col_count(), lp.row_count());
  }
  return kExitOk;
}

int cmd_synth_load(int year, std::uint64_t seed, double peak_kw, const std::string& out) {
  const auto rows = synth_load_hourly(year, seed, peak_kw);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + out);
  f << to_csv(rows);
  std::printf("wrote %zu hourly readings to %s\n", rows.size(), out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bill-minimising dispatch of flexible demand and batteries under TOU tariffs"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int month = 1;
  int jobs = 0;
  AssetFlags assets;

  std::string tariff_path;
  auto* validate_cmd = app.add_subcommand("validate-tariff", "check a tariff JSON file");
  validate_cmd->add_option("path", tariff_path, "tariff JSON")->required();

  auto* solve_cmd = app.add_subcommand("solve", "solve one month and print the bill breakdown");
  solve_cmd->add_option("--config", config, "run config JSON")->required();
  solve_cmd->add_option("--month", month, "month 1..12")->capture_default_str();
  add_asset_flags(solve_cmd, assets);

  auto* annual_cmd = app.add_subcommand("annual", "twelve monthly solves with verification");
  annual_cmd->add_option("--config", config, "run config JSON")->required();
  add_asset_flags(annual_cmd, assets);

  auto* sweep_cmd = app.add_subcommand("sweep", "flexibility and battery sweeps under both tariffs");
  sweep_cmd->add_option("--config", config, "run config JSON")->required();
  sweep_cmd->add_option("--out", out, "output directory (overrides the config)");
  sweep_cmd->add_option("--jobs", jobs, "parallel workers (overrides the config)");

  auto* dump_cmd = app.add_subcommand("dump-lp", "write one month's LP in CPLEX LP format");
  dump_cmd->add_option("--config", config, "run config JSON")->required();
  dump_cmd->add_option("--month", month, "month 1..12")->capture_default_str();
  dump_cmd->add_option("--out", out, "output file, '-' for stdout");
  add_asset_flags(dump_cmd, assets);

  int year = 2021;
  std::uint64_t seed = 1;
  double peak_kw = 220.9;
  auto* synth_cmd = app.add_subcommand("synth-load", "generate a synthetic hourly load CSV");
  synth_cmd->add_option("--year", year)->capture_default_str();
  synth_cmd->add_option("--seed", seed)->capture_default_str();
  synth_cmd->add_option("--peak-kw", peak_kw)->capture_default_str();
  synth_cmd->add_option("--out", out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitInvalid;
  }

  try {
    if (*validate_cmd) return cmd_validate_tariff(tariff_path);
    if (*solve_cmd) return cmd_solve(config, month, assets);
    if (*annual_cmd) return cmd_annual(config, assets);
    if (*sweep_cmd) return cmd_sweep(config, out, jobs);
    if (*dump_cmd) return cmd_dump_lp(config, month, assets, out);
    if (*synth_cmd) return cmd_synth_load(year, seed, peak_kw, out);
  } catch (const SolveFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolve;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
