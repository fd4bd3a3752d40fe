#include "flexbill/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "Highs.h"
#include "json.hpp"

namespace flexbill {

using nlohmann::json;

const char* version_string() { return "0.3.0"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Flex:
      return "flex";
    case Family::Bes:
      return "bes";
    case Family::None:
      return "none";
  }
  return "none";
}

YearData make_year_data(int year, const SeriesTable& load, const SeriesTable* pv_table,
                        double pv_nameplate) {
  YearData d;
  d.year = year;
  for (int m = 1; m <= 12; ++m) {
    TimeGrid grid(year, m);
    d.d_base.push_back(load.slice(grid));
    d.p_pv.push_back(pv_table ? pv_table->slice(grid) : synth_pv(pv_nameplate, grid).p_pv);
    d.grids.push_back(grid);
  }
  d.annual_max = 0.0;
  for (const auto& month : d.d_base) {
    for (double v : month) d.annual_max = std::max(d.annual_max, v);
  }
  return d;
}

std::optional<FlexSpec> AssetPoint::flex() const {
  if (flex_pct <= 0.0) return std::nullopt;
  return FlexSpec{flex_pct, recovery_hours};
}

std::optional<BatterySpec> AssetPoint::battery(double annual_max, const BatteryDefaults& defaults) const {
  if (power_ratio <= 0.0) return std::nullopt;
  return battery_from_sweep(power_ratio, duration_hours, annual_max, defaults);
}

std::string AssetPoint::label() const {
  char buf[96];
  std::string out;
  if (flex_pct > 0.0) {
    std::snprintf(buf, sizeof buf, "flex f=%g recovery=%gh", flex_pct, recovery_hours);
    out = buf;
  }
  if (power_ratio > 0.0) {
    std::snprintf(buf, sizeof buf, "bes ratio=%g duration=%gh", power_ratio, duration_hours);
    out += out.empty() ? buf : std::string(", ") + buf;
  }
  return out.empty() ? "no assets" : out;
}

AnnualRun run_annual(const AssetPoint& point, const TariffSchedule& tariff, const YearData& data,
                     const BatteryDefaults& defaults, const SolveOptions& options) {
  AnnualRun run;
  auto& r = run.result;
  r.tariff_id = tariff.id;
  r.asset_label = point.label();
  const auto flex = point.flex();
  const auto battery = point.battery(data.annual_max, defaults);

  for (std::size_t m = 0; m < data.grids.size(); ++m) {
    MonthInputs in{data.grids[m], data.d_base[m], data.p_pv[m], battery, flex};
    const auto lp = build_lp(in, tariff);
    auto sol = solve_lp(lp, options);
    const std::string month_tag = "month " + std::to_string(data.grids[m].month());
    if (!sol.optimal()) {
      run.error = month_tag + ": solver status " + to_string(sol.status) + " (" + sol.detail + ")";
      return run;
    }
    auto report = verify_solution(sol, in, tariff);
    if (!report.passed()) {
      run.error = month_tag + ": verification failed: " + report.failures.front();
      return run;
    }
    r.month_starts.push_back(r.d_net.size());
    r.d_net.insert(r.d_net.end(), sol.d_net.begin(), sol.d_net.end());
    const auto mask = peak_mask(tariff.calendar, data.grids[m]);
    r.peak.insert(r.peak.end(), mask.begin(), mask.end());
    r.annual_bill += sol.objective_value;
    r.grids.push_back(data.grids[m]);
    r.months.push_back(std::move(sol));
    r.reports.push_back(std::move(report));
  }
  run.metrics = compute_metrics(r);
  return run;
}

std::vector<double> default_recovery_hours() { return {1, 2, 4, 8, 12, 24}; }

std::vector<double> default_flex_pct() {
  std::vector<double> v;
  for (int i = 0; i <= 10; ++i) v.push_back(i / 10.0);
  return v;
}

std::vector<double> default_power_ratio() {
  std::vector<double> v;
  for (int i = 0; i <= 14; ++i) v.push_back(i / 10.0);
  return v;
}

std::vector<double> default_duration_hours() { return {1, 2, 3, 4}; }

namespace {

std::vector<double> number_list(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(where + "." + key + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: must be a JSON object");

  SweepConfig c;
  c.source_text = text;
  auto path_field = [&](const char* key, bool required) -> std::filesystem::path {
    if (!j.contains(key) || j[key].is_null()) {
      if (required) throw ValidationError(std::string("config: missing field '") + key + "'");
      return {};
    }
    if (!j[key].is_string()) throw ValidationError(std::string("config: '") + key + "' must be a path string");
    return resolve(base_dir, j[key].get<std::string>());
  };
  if (j.contains("year")) {
    if (!j["year"].is_number_integer()) throw ValidationError("config: 'year' must be an integer");
    c.year = j["year"].get<int>();
  }
  c.load_csv = path_field("load_csv", true);
  c.pv_csv = path_field("pv_csv", false);
  if (j.contains("pv_nameplate_kw")) {
    if (!j["pv_nameplate_kw"].is_number()) throw ValidationError("config: 'pv_nameplate_kw' must be a number");
    c.pv_nameplate_kw = j["pv_nameplate_kw"].get<double>();
  }
  c.base_tariff = path_field("base_tariff", true);
  c.storage_tariff = path_field("storage_tariff", true);
  if (j.contains("output_dir")) c.output_dir = path_field("output_dir", false);

  const json flex = j.value("flex", json::object());
  c.recovery_hours = flex.contains("recovery_hours") ? number_list(flex["recovery_hours"], "recovery_hours", "flex")
                                                      : default_recovery_hours();
  c.flex_pct = flex.contains("flex_pct") ? number_list(flex["flex_pct"], "flex_pct", "flex") : default_flex_pct();

  const json bes = j.value("battery", json::object());
  c.power_ratio = bes.contains("power_ratio") ? number_list(bes["power_ratio"], "power_ratio", "battery")
                                              : default_power_ratio();
  c.duration_hours = bes.contains("duration_hours")
                         ? number_list(bes["duration_hours"], "duration_hours", "battery")
                         : default_duration_hours();
  if (bes.contains("eta")) c.battery_defaults.eta = bes["eta"].get<double>();
  if (bes.contains("j_init_fraction")) c.battery_defaults.j_init_fraction = bes["j_init_fraction"].get<double>();

  c.enforce_eligibility = j.value("enforce_eligibility", false);
  if (j.contains("jobs")) {
    if (!j["jobs"].is_number_integer() || j["jobs"].get<int>() < 1) {
      throw ValidationError("config: 'jobs' must be a positive integer");
    }
    c.jobs = j["jobs"].get<unsigned>();
  }
  c.write_json = j.value("write_json", false);
  validate(c);
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str(), path.parent_path());
}

void validate(const SweepConfig& c) {
  if (!c.flex_enabled() && !c.bes_enabled()) {
    throw ValidationError("config: both sweep families are empty");
  }
  for (double f : c.flex_pct) {
    if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("config: flex.flex_pct values must be in [0, 1]");
  }
  for (double h : c.recovery_hours) validate(FlexSpec{0.5, h});
  for (double r : c.power_ratio) {
    if (!(r >= 0.0)) throw ValidationError("config: battery.power_ratio values must be >= 0");
  }
  for (double d : c.duration_hours) {
    if (!(d > 0.0)) throw ValidationError("config: battery.duration_hours values must be > 0");
  }
  const auto& b = c.battery_defaults;
  if (!(b.eta > 0.0 && b.eta <= 1.0)) throw ValidationError("config: battery.eta must be in (0, 1]");
  if (!(b.j_init_fraction >= 0.0 && b.j_init_fraction <= 1.0)) {
    throw ValidationError("config: battery.j_init_fraction must be in [0, 1]");
  }
  if (!(c.pv_nameplate_kw >= 0.0)) throw ValidationError("config: pv_nameplate_kw must be >= 0");
  if (c.jobs < 1) throw ValidationError("config: jobs must be >= 1");
}

namespace {

struct Task {
  std::size_t point;
  int tariff;  // 0 base, 1 storage
};

std::vector<AssetPoint> expand(const SweepConfig& c, Family family) {
  std::vector<AssetPoint> pts;
  if (family == Family::Flex) {
    auto rh = c.recovery_hours;
    auto fp = c.flex_pct;
    std::sort(rh.begin(), rh.end());
    std::sort(fp.begin(), fp.end());
    rh.erase(std::unique(rh.begin(), rh.end()), rh.end());
    fp.erase(std::unique(fp.begin(), fp.end()), fp.end());
    for (double h : rh) {
      for (double f : fp) pts.push_back({Family::Flex, h, f, 0.0, 0.0});
    }
  } else {
    auto pr = c.power_ratio;
    auto dh = c.duration_hours;
    std::sort(pr.begin(), pr.end());
    std::sort(dh.begin(), dh.end());
    pr.erase(std::unique(pr.begin(), pr.end()), pr.end());
    dh.erase(std::unique(dh.begin(), dh.end()), dh.end());
    for (double r : pr) {
      for (double d : dh) pts.push_back({Family::Bes, 0.0, 0.0, r, d});
    }
  }
  return pts;
}

}  // namespace

SweepOutcome evaluate_sweep(const SweepConfig& config, const YearData& data,
                            const TariffSchedule& base, const TariffSchedule& storage,
                            const SolveOptions& options) {
  SweepOutcome out;
  for (const Family family : {Family::Flex, Family::Bes}) {
    if (family == Family::Flex && !config.flex_enabled()) continue;
    if (family == Family::Bes && !config.bes_enabled()) continue;
    const auto points = expand(config, family);

    std::vector<std::optional<bool>> eligible(points.size());
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (family == Family::Bes) {
        const BatterySpec b = battery_from_sweep(points[i].power_ratio, points[i].duration_hours,
                                                 data.annual_max, config.battery_defaults);
        eligible[i] = option_s_eligible(b, data.annual_max);
      }
      tasks.push_back({i, 0});
      if (!(config.enforce_eligibility && eligible[i] == false)) tasks.push_back({i, 1});
    }

    std::vector<std::optional<AnnualRun>> runs(points.size() * 2);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < tasks.size(); k = next++) {
        const auto& task = tasks[k];
        const auto& tariff = task.tariff == 0 ? base : storage;
        AnnualRun run;
        try {
          run = run_annual(points[task.point], tariff, data, config.battery_defaults, options);
        } catch (const std::exception& e) {
          run.error = e.what();
        }
        // each slot is written by exactly one task
        runs[task.point * 2 + static_cast<std::size_t>(task.tariff)] = std::move(run);
      }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(tasks.size())));
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    auto& rows = family == Family::Flex ? out.flex_rows : out.bes_rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
      bool point_failed = false;
      const AnnualRun* pair[2] = {nullptr, nullptr};
      for (int k = 0; k < 2; ++k) {
        const auto& tariff = k == 0 ? base : storage;
        SweepRow row;
        row.family = family;
        row.point = points[i];
        row.tariff_id = tariff.id;
        row.eligible = eligible[i];
        const auto& slot = runs[i * 2 + static_cast<std::size_t>(k)];
        if (!slot) {
          row.status = "ineligible";
        } else if (!slot->ok()) {
          row.status = "error: " + slot->error;
          point_failed = true;
        } else {
          row.annual_bill = slot->metrics.total_bill;
          row.mean_peak_ramp = slot->metrics.mean_peak_ramp;
          row.mean_peak_net = slot->metrics.mean_peak_net_demand;
          pair[k] = &*slot;
        }
        rows.push_back(std::move(row));
      }
      SweepRow ratio;
      ratio.family = family;
      ratio.point = points[i];
      ratio.tariff_id = kRatioTariffId;
      ratio.eligible = eligible[i];
      if (pair[0] && pair[1]) {
        const auto& sm = pair[1]->metrics;
        const auto& bm = pair[0]->metrics;
        const auto rs = relative_metrics(sm, bm);
        ratio.ratio_bill = rs.bill;
        ratio.ratio_ramp = rs.ramp;
        ratio.ratio_net = rs.net;
        ratio.annual_bill = sm.total_bill - bm.total_bill;
        ratio.mean_peak_ramp = sm.mean_peak_ramp - bm.mean_peak_ramp;
        ratio.mean_peak_net = sm.mean_peak_net_demand - bm.mean_peak_net_demand;
      } else {
        ratio.status = point_failed ? "error" : "ineligible";
      }
      if (point_failed) ++out.failed_points;
      rows.push_back(std::move(ratio));
    }
  }
  return out;
}

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepCsvHeader << "\n";
  const auto opt = [](const std::optional<double>& v) { return v ? fmt6(*v) : std::string(); };
  const auto ratio = [](const std::optional<double>& v, bool ratio_row) {
    if (!ratio_row) return std::string();
    return v ? fmt6(*v) : std::string("undefined");
  };
  for (const auto& r : rows) {
    const bool is_ratio = r.tariff_id == kRatioTariffId;
    const bool flex = r.family == Family::Flex;
    out << to_string(r.family) << ',' << (flex ? fmt6(r.point.recovery_hours) : "") << ','
        << (flex ? fmt6(r.point.flex_pct) : "") << ',' << (flex ? "" : fmt6(r.point.power_ratio)) << ','
        << (flex ? "" : fmt6(r.point.duration_hours)) << ',' << csv_field(r.tariff_id) << ','
        << opt(r.annual_bill) << ',' << opt(r.mean_peak_ramp) << ',' << opt(r.mean_peak_net) << ','
        << ratio(r.ratio_bill, is_ratio) << ',' << ratio(r.ratio_ramp, is_ratio) << ','
        << ratio(r.ratio_net, is_ratio) << ','
        << (r.eligible ? (*r.eligible ? "true" : "false") : "") << ',' << csv_field(r.status) << "\n";
  }
}

namespace {

std::string file_hash(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  std::stringstream ss;
  ss << in.rdbuf();
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(ss.str())));
  return buf;
}

json rows_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["family"] = to_string(r.family);
    j["recovery_hours"] = r.point.recovery_hours;
    j["flex_pct"] = r.point.flex_pct;
    j["power_ratio"] = r.point.power_ratio;
    j["duration_hours"] = r.point.duration_hours;
    j["tariff_id"] = r.tariff_id;
    auto put = [&](const char* key, const std::optional<double>& v) {
      j[key] = v ? json(*v) : json(nullptr);
    };
    put("annual_bill", r.annual_bill);
    put("mean_peak_ramp_kw", r.mean_peak_ramp);
    put("mean_peak_net_kw", r.mean_peak_net);
    put("ratio_bill", r.ratio_bill);
    put("ratio_ramp", r.ratio_ramp);
    put("ratio_net", r.ratio_net);
    j["eligible"] = r.eligible ? json(*r.eligible) : json(nullptr);
    j["status"] = r.status;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig& config) {
  validate(config);
  const auto base = load_tariff(config.base_tariff);
  const auto storage = load_tariff(config.storage_tariff);
  const auto load = SeriesTable::read_csv(config.load_csv);
  std::optional<SeriesTable> pv;
  if (!config.pv_csv.empty()) pv = SeriesTable::read_csv(config.pv_csv);
  const auto data = make_year_data(config.year, load, pv ? &*pv : nullptr, config.pv_nameplate_kw);

  const auto outcome = evaluate_sweep(config, data, base, storage);

  std::filesystem::create_directories(config.output_dir);
  auto write = [&](const char* name, const std::vector<SweepRow>& rows) {
    std::ofstream f(config.output_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (config.output_dir / name).string());
    write_sweep_csv(rows, f);
  };
  if (config.flex_enabled()) write("flex_sweep.csv", outcome.flex_rows);
  if (config.bes_enabled()) write("bes_sweep.csv", outcome.bes_rows);

  if (config.write_json) {
    json results;
    results["flex"] = rows_json(outcome.flex_rows);
    results["bes"] = rows_json(outcome.bes_rows);
    std::ofstream f(config.output_dir / "sweep_results.json", std::ios::binary);
    f << results.dump(1) << "\n";
  }

  json manifest;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(config.source_text)));
  manifest["config_hash_fnv1a64"] = hash;
  manifest["input_hashes_fnv1a64"] = {
      {"load_csv", file_hash(config.load_csv)},
      {"pv_csv", config.pv_csv.empty() ? "" : file_hash(config.pv_csv)},
      {"base_tariff", file_hash(config.base_tariff)},
      {"storage_tariff", file_hash(config.storage_tariff)}};
  manifest["versions"] = {{"flexbill", version_string()},
                          {"highs", std::to_string(highsVersionMajor()) + "." +
                                        std::to_string(highsVersionMinor()) + "." +
                                        std::to_string(highsVersionPatch())}};
  manifest["year"] = config.year;
  manifest["annual_max_kw"] = data.annual_max;
  manifest["flex_points"] = outcome.flex_rows.size() / 3;
  manifest["bes_points"] = outcome.bes_rows.size() / 3;
  manifest["failed_points"] = outcome.failed_points;
  manifest["jobs"] = config.jobs;
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  manifest["timestamp_unix"] = secs;
  std::ofstream f(config.output_dir / "run_manifest.json", std::ios::binary);
  f << manifest.dump(2) << "\n";
  return outcome;
}

}  // namespace flexbill
