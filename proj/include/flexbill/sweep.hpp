#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "flexbill/assets.hpp"
#include "flexbill/lp.hpp"
#include "flexbill/metrics.hpp"
#include "flexbill/tariff.hpp"

namespace flexbill {

// Twelve months of load and PV on the 15-minute grid.
struct YearData {
  int year = 0;
  std::vector<TimeGrid> grids;
  std::vector<std::vector<double>> d_base;
  std::vector<std::vector<double>> p_pv;
  double annual_max = 0.0;
};

YearData make_year_data(int year, const SeriesTable& load, const SeriesTable* pv_table,
                        double pv_nameplate);

enum class Family { None, Flex, Bes };
std::string to_string(Family f);

struct AssetPoint {
  Family family = Family::None;
  double recovery_hours = 0.0;
  double flex_pct = 0.0;
  double power_ratio = 0.0;
  double duration_hours = 0.0;

  std::optional<FlexSpec> flex() const;
  std::optional<BatterySpec> battery(double annual_max, const BatteryDefaults& defaults) const;
  std::string label() const;
};

struct AnnualRun {
  AnnualResult result;
  MetricSet metrics;
  std::string error;  // empty when all twelve months solved and verified

  bool ok() const { return error.empty(); }
};

// Twelve independent monthly build -> solve -> verify cycles. Stops at the
// first month that fails and reports it in `error`.
AnnualRun run_annual(const AssetPoint& point, const TariffSchedule& tariff, const YearData& data,
                     const BatteryDefaults& defaults = {}, const SolveOptions& options = {});

struct SweepConfig {
  int year = 2021;
  std::filesystem::path load_csv;
  std::filesystem::path pv_csv;         // empty: synthesise from pv_nameplate_kw
  double pv_nameplate_kw = 231.8;
  std::filesystem::path base_tariff;
  std::filesystem::path storage_tariff;
  std::filesystem::path output_dir = "out";

  std::vector<double> recovery_hours;
  std::vector<double> flex_pct;
  std::vector<double> power_ratio;
  std::vector<double> duration_hours;
  BatteryDefaults battery_defaults;
  bool enforce_eligibility = false;
  unsigned jobs = 1;
  bool write_json = false;

  std::string source_text;  // raw config bytes, hashed into the manifest

  bool flex_enabled() const { return !recovery_hours.empty() && !flex_pct.empty(); }
  bool bes_enabled() const { return !power_ratio.empty() && !duration_hours.empty(); }
};

std::vector<double> default_recovery_hours();
std::vector<double> default_flex_pct();
std::vector<double> default_power_ratio();
std::vector<double> default_duration_hours();

// Relative paths resolve against base_dir. Missing axis keys take the
// defaults; an explicitly empty list disables that family.
SweepConfig parse_sweep_config(const std::string& text, const std::filesystem::path& base_dir);
SweepConfig load_sweep_config(const std::filesystem::path& path);
void validate(const SweepConfig& config);

struct SweepRow {
  Family family = Family::Flex;
  AssetPoint point;
  std::string tariff_id;  // "ratio" on the comparison row
  std::optional<double> annual_bill;
  std::optional<double> mean_peak_ramp;
  std::optional<double> mean_peak_net;
  std::optional<double> ratio_bill;
  std::optional<double> ratio_ramp;
  std::optional<double> ratio_net;
  std::optional<bool> eligible;
  std::string status = "ok";
};

inline constexpr const char* kRatioTariffId = "ratio";
inline constexpr const char* kSweepCsvHeader =
    "family,recovery_hours,flex_pct,power_ratio,duration_hours,tariff_id,annual_bill,"
    "mean_peak_ramp_kw,mean_peak_net_kw,ratio_bill,ratio_ramp,ratio_net,eligible,status";

struct SweepOutcome {
  std::vector<SweepRow> flex_rows;
  std::vector<SweepRow> bes_rows;
  std::size_t failed_points = 0;
};

// Evaluates every sweep point under both tariffs. Rows per point: base,
// storage, then the comparison row (storage / base ratios; value columns
// hold storage - base differences).
SweepOutcome evaluate_sweep(const SweepConfig& config, const YearData& data,
                            const TariffSchedule& base, const TariffSchedule& storage,
                            const SolveOptions& options = {});

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

// Loads inputs, evaluates, and writes flex_sweep.csv / bes_sweep.csv /
// run_manifest.json (and sweep_results.json when requested) to output_dir.
SweepOutcome run_sweep(const SweepConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

const char* version_string();

}  // namespace flexbill
