#include "flexbill/assets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "flexbill/tariff.hpp"

namespace flexbill {

namespace chr = std::chrono;

std::size_t FlexSpec::delta_steps() const {
  return static_cast<std::size_t>(std::llround(recovery_hours * kStepsPerHour));
}

void validate(const BatterySpec& b) {
  if (!(b.bpr >= 0.0)) throw ValidationError("battery: bpr must be >= 0");
  if (!(b.ber >= 0.0)) throw ValidationError("battery: ber must be >= 0");
  if (!(b.eta > 0.0 && b.eta <= 1.0)) throw ValidationError("battery: eta must be in (0, 1]");
  if (!(b.j_init >= 0.0 && b.j_init <= b.ber)) {
    throw ValidationError("battery: j_init must be in [0, ber]");
  }
}

void validate(const FlexSpec& f) {
  if (!(f.flex_pct >= 0.0 && f.flex_pct <= 1.0)) throw ValidationError("flex: flex_pct must be in [0, 1]");
  if (!(f.recovery_hours > 0.0)) throw ValidationError("flex: recovery_hours must be > 0");
  const double steps = f.recovery_hours * kStepsPerHour;
  if (std::abs(steps - std::round(steps)) > 1e-9 || std::round(steps) < 1.0) {
    throw ValidationError("flex: recovery_hours must be a positive multiple of 0.25 h");
  }
}

std::int64_t minutes_since_epoch(const StepTime& s) {
  const auto days = chr::sys_days{s.date}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 1440 + s.minute_of_day;
}

std::optional<std::int64_t> parse_timestamp(const std::string& s) {
  int y = 0;
  unsigned mo = 0, d = 0;
  int hh = 0, mm = 0, ss = 0;
  char sep = 0;
  int consumed = 0;
  const int n = std::sscanf(s.c_str(), "%4d-%2u-%2u%c%2d:%2d%n", &y, &mo, &d, &sep, &hh, &mm, &consumed);
  if (n != 6 || (sep != 'T' && sep != ' ')) return std::nullopt;
  std::string rest = s.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty()) {
    int extra = 0;
    if (std::sscanf(rest.c_str(), ":%2d%n", &ss, &extra) != 1 || static_cast<std::size_t>(extra) != rest.size()) {
      return std::nullopt;
    }
    if (ss != 0) return std::nullopt;
  }
  const chr::year_month_day ymd{chr::year{y}, chr::month{mo}, chr::day{d}};
  if (!ymd.ok() || hh < 0 || hh > 23 || mm < 0 || mm > 59) return std::nullopt;
  return minutes_since_epoch(StepTime{ymd, hh * 60 + mm});
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

SeriesTable SeriesTable::parse_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::map<std::int64_t, double> raw;
  auto fail = [&](const std::string& msg) {
    throw ValidationError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line != "timestamp,kw") fail("expected header 'timestamp,kw'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected 'timestamp,kw'");
    const auto ts = parse_timestamp(trim(line.substr(0, comma)));
    if (!ts) fail("bad timestamp '" + line.substr(0, comma) + "'");
    double kw = 0.0;
    try {
      std::size_t used = 0;
      const std::string field = trim(line.substr(comma + 1));
      kw = std::stod(field, &used);
      if (used != field.size()) fail("bad kW value '" + field + "'");
    } catch (const std::logic_error&) {
      fail("bad kW value");
    }
    if (!std::isfinite(kw)) fail("non-finite kW value");
    if (kw < 0.0) fail("negative kW reading");
    if (!raw.emplace(*ts, kw).second) fail("duplicate timestamp");
  }
  if (!header_seen) throw ValidationError(origin + ": empty CSV");
  if (raw.empty()) throw ValidationError(origin + ": no readings");

  SeriesTable table;
  table.origin_ = origin;
  if (raw.size() == 1) {
    table.resolution_ = 60;
  } else {
    std::int64_t min_delta = INT64_MAX;
    for (auto it = std::next(raw.begin()); it != raw.end(); ++it) {
      min_delta = std::min(min_delta, it->first - std::prev(it)->first);
    }
    if (min_delta != 15 && min_delta != 60) {
      throw ValidationError(origin + ": resolution must be 15 or 60 minutes, found " +
                            std::to_string(min_delta));
    }
    table.resolution_ = static_cast<int>(min_delta);
    for (auto it = std::next(raw.begin()); it != raw.end(); ++it) {
      const auto delta = it->first - std::prev(it)->first;
      if (delta != min_delta) {
        throw ValidationError(origin + ": gap of " + std::to_string(delta) + " minutes before " +
                              std::to_string(it->first) + " (resolution " +
                              std::to_string(min_delta) + ")");
      }
    }
  }
  if (table.resolution_ == 60) {
    for (const auto& [key, kw] : raw) {
      if (key % 60 != 0) throw ValidationError(origin + ": hourly timestamps must be on the hour");
    }
  } else {
    for (const auto& [key, kw] : raw) {
      if (key % 15 != 0) throw ValidationError(origin + ": timestamps must align to 15 minutes");
    }
  }

  const int hold = table.resolution_ / kStepMinutes;
  for (const auto& [key, kw] : raw) {
    for (int k = 0; k < hold; ++k) table.values_.emplace(key + k * kStepMinutes, kw);
    table.max_ = std::max(table.max_, kw);
  }
  return table;
}

SeriesTable SeriesTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path.string());
}

std::vector<double> SeriesTable::slice(const TimeGrid& grid) const {
  std::vector<double> out(grid.count());
  const std::int64_t start = minutes_since_epoch(grid.at(0));
  auto it = values_.find(start);
  for (std::size_t t = 0; t < grid.count(); ++t) {
    const std::int64_t key = start + static_cast<std::int64_t>(t) * kStepMinutes;
    if (it == values_.end() || it->first != key) {
      throw ValidationError(origin_ + ": no reading covers " + grid.at(t).iso());
    }
    out[t] = it->second;
    ++it;
  }
  return out;
}

LoadProfile load_from_table(const SeriesTable& table, const TimeGrid& grid) {
  return {table.slice(grid), table.max_value()};
}

LoadProfile ingest_load_csv(const std::filesystem::path& path, const TimeGrid& grid) {
  return load_from_table(SeriesTable::read_csv(path), grid);
}

double day_length_hours(int month) {
  // roughly 37 N latitude
  static constexpr double kHours[12] = {9.8, 10.8, 11.9, 13.1, 14.1, 14.6,
                                        14.4, 13.5, 12.3, 11.1, 10.1, 9.6};
  if (month < 1 || month > 12) throw std::invalid_argument("month must be in 1..12");
  return kHours[month - 1];
}

PvProfile synth_pv(double nameplate, const TimeGrid& grid) {
  if (!(nameplate >= 0.0)) throw ValidationError("pv: nameplate must be >= 0");
  PvProfile pv{std::vector<double>(grid.count(), 0.0), nameplate};
  const double length = day_length_hours(grid.month());
  const double sunrise = 12.0 - length / 2.0;
  const double peak = nameplate * kPvDerate;
  for (std::size_t t = 0; t < grid.count(); ++t) {
    const double hour = static_cast<double>(t % kStepsPerDay) / kStepsPerHour;
    const double x = (hour - sunrise) / length;
    if (x > 0.0 && x < 1.0) pv.p_pv[t] = peak * std::sin(std::numbers::pi * x);
  }
  return pv;
}

FlexBounds flex_bounds(const FlexSpec& flex, std::span<const double> d_base) {
  FlexBounds b{std::vector<double>(d_base.size()), std::vector<double>(d_base.size())};
  for (std::size_t t = 0; t < d_base.size(); ++t) {
    b.upper[t] = flex.flex_pct * d_base[t];
    b.lower[t] = -b.upper[t];
  }
  return b;
}

FlexBounds flex_bounds(const FlexSpec& flex, const LoadProfile& load) {
  return flex_bounds(flex, std::span<const double>(load.d_base));
}

BatterySpec battery_from_sweep(double power_ratio, double duration_hours, double annual_max,
                               const BatteryDefaults& defaults) {
  if (!(power_ratio >= 0.0)) throw ValidationError("battery: power_ratio must be >= 0");
  if (!(duration_hours > 0.0)) throw ValidationError("battery: duration_hours must be > 0");
  BatterySpec b;
  b.bpr = power_ratio * annual_max;
  b.ber = duration_hours * b.bpr;
  b.eta = defaults.eta;
  b.j_init = defaults.j_init_fraction * b.ber;
  return b;
}

bool option_s_eligible(const BatterySpec& battery, double annual_max) {
  // inclusive boundary; 0.1 * 220.9 is not exactly 22.09 in binary
  const double threshold = kOptionSMinPowerFraction * annual_max;
  return battery.present() && battery.bpr >= threshold * (1.0 - 1e-12);
}

std::vector<SyntheticLoadRow> synth_load_hourly(int year, std::uint64_t seed, double peak_kw) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.04);
  auto bump = [](double h, double centre, double width) {
    const double z = (h - centre) / width;
    return std::exp(-0.5 * z * z);
  };

  std::vector<SyntheticLoadRow> rows;
  const chr::sys_days first{chr::year{year} / chr::January / 1};
  const chr::sys_days end{chr::year{year + 1} / chr::January / 1};
  for (chr::sys_days day = first; day < end; day += chr::days{1}) {
    const chr::year_month_day ymd{day};
    const int doy = static_cast<int>((day - first).count());
    // warmer months lift the evening peak
    const double season = 1.0 + 0.25 * std::cos(2.0 * std::numbers::pi * (doy - 200) / 365.0);
    const StepTime probe{ymd, 0};
    const double day_scale = probe.is_weekend() ? 0.65 : 1.0;
    for (int h = 0; h < 24; ++h) {
      const double hh = h + 0.5;
      double kw = 60.0 + 70.0 * bump(hh, 8.0, 1.6) + 25.0 * bump(hh, 13.0, 3.0) +
                  95.0 * season * bump(hh, 18.5, 1.8);
      kw *= day_scale * (1.0 + noise(rng));
      rows.push_back({StepTime{ymd, h * 60}, std::max(kw, 5.0)});
    }
  }
  auto top = std::max_element(rows.begin(), rows.end(),
                              [](const auto& a, const auto& b) { return a.kw < b.kw; });
  const double scale = peak_kw / top->kw;
  for (auto& r : rows) r.kw = std::round(r.kw * scale * 100.0) / 100.0;
  top->kw = peak_kw;
  return rows;
}

std::string to_csv(const std::vector<SyntheticLoadRow>& rows) {
  std::string out = "timestamp,kw\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.2f\n", r.start.iso().c_str(), r.kw);
    out += buf;
  }
  return out;
}

}  // namespace flexbill
