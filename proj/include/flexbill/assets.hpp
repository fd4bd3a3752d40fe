#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexbill/calendar.hpp"

namespace flexbill {

// kW per 15-minute step, keyed by the step's start time.
struct LoadProfile {
  std::vector<double> d_base;
  double annual_max = 0.0;  // over every reading in the source (a year when the file covers one)
};

struct PvProfile {
  std::vector<double> p_pv;
  double nameplate = 0.0;
};

struct BatterySpec {
  double bpr = 0.0;   // kW
  double ber = 0.0;   // kWh
  double eta = 0.85;  // applied to charging only
  double j_init = 0.0;

  bool present() const { return bpr > 0.0; }
};

struct BatteryDefaults {
  double eta = 0.85;
  double j_init_fraction = 0.5;
};

struct FlexSpec {
  double flex_pct = 0.0;        // f in [0, 1]
  double recovery_hours = 1.0;  // must be a multiple of 0.25 h

  std::size_t delta_steps() const;
  bool present() const { return flex_pct > 0.0; }
};

struct FlexBounds {
  std::vector<double> lower;  // <= 0
  std::vector<double> upper;  // >= 0
};

void validate(const BatterySpec& b);
void validate(const FlexSpec& f);

// Parsed "timestamp,kw" CSV at 15-minute resolution; hourly sources are
// step-held onto four quarter-hour steps. Key is minutes since 1970-01-01
// local civil time.
class SeriesTable {
 public:
  static SeriesTable read_csv(const std::filesystem::path& path);
  static SeriesTable parse_csv(const std::string& text, const std::string& origin = "<string>");

  // Throws ValidationError if any grid step is missing.
  std::vector<double> slice(const TimeGrid& grid) const;
  double max_value() const { return max_; }
  int resolution_minutes() const { return resolution_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::map<std::int64_t, double> values_;
  double max_ = 0.0;
  int resolution_ = 0;
  std::string origin_;
};

std::int64_t minutes_since_epoch(const StepTime& s);
// Accepts "YYYY-MM-DDTHH:MM[:SS]" or with a space separator.
std::optional<std::int64_t> parse_timestamp(const std::string& s);

LoadProfile ingest_load_csv(const std::filesystem::path& path, const TimeGrid& grid);
LoadProfile load_from_table(const SeriesTable& table, const TimeGrid& grid);

inline constexpr double kPvDerate = 0.85;

// Deterministic clear-sky stand-in: half-sine between sunrise and sunset
// centred on noon with a monthly day-length table.
PvProfile synth_pv(double nameplate, const TimeGrid& grid);
double day_length_hours(int month);

FlexBounds flex_bounds(const FlexSpec& flex, std::span<const double> d_base);
FlexBounds flex_bounds(const FlexSpec& flex, const LoadProfile& load);

BatterySpec battery_from_sweep(double power_ratio, double duration_hours, double annual_max,
                               const BatteryDefaults& defaults = {});

inline constexpr double kOptionSMinPowerFraction = 0.10;

bool option_s_eligible(const BatterySpec& battery, double annual_max);

// Synthetic commercial load with morning and evening peaks, scaled so the
// yearly maximum equals peak_kw. Hourly resolution.
struct SyntheticLoadRow {
  StepTime start;
  double kw;
};
std::vector<SyntheticLoadRow> synth_load_hourly(int year, std::uint64_t seed, double peak_kw = 220.9);
std::string to_csv(const std::vector<SyntheticLoadRow>& rows);

}  // namespace flexbill
