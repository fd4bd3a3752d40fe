#include "flexbill/tariff.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace flexbill {

using nlohmann::json;

double TariffSchedule::tou_demand_rate(const std::string& period) const {
  return dr_tou.at(calendar.period_index(period));
}

double TariffSchedule::energy_rate(const std::string& period) const {
  return er.at(calendar.period_index(period));
}

bool TariffSchedule::all_demand_rates_positive() const {
  return dr_max > 0.0 && std::all_of(dr_tou.begin(), dr_tou.end(), [](double r) { return r > 0.0; });
}

void validate(const TariffSchedule& t) {
  const auto& periods = t.calendar.periods();
  auto fail = [&](const std::string& msg) { throw ValidationError("tariff '" + t.id + "': " + msg); };
  if (t.id.empty()) fail("id must be non-empty");
  if (!(t.dr_max >= 0.0)) fail("demand_rate_max must be >= 0");
  if (!(t.nbc >= 0.0)) fail("non_bypassable_charge must be >= 0");
  if (t.dr_tou.size() != periods.size() || t.er.size() != periods.size()) {
    fail("rate vectors do not match the calendar's period count");
  }
  for (std::size_t p = 0; p < periods.size(); ++p) {
    if (!(t.dr_tou[p] >= 0.0)) fail("demand_rates." + periods[p] + " must be >= 0");
    if (!(t.er[p] >= 0.0)) fail("energy_rates." + periods[p] + " must be >= 0");
    if (t.er[p] < t.nbc) {
      std::ostringstream os;
      os << "energy_rates." << periods[p] << " = " << t.er[p]
         << " is below non_bypassable_charge = " << t.nbc;
      fail(os.str());
    }
  }
}

namespace {

double number_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  if (!j.at(key).is_number()) throw ValidationError(where + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

HourRange parse_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ValidationError(where + ": hour range must be [begin, end] integers");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

TariffSchedule parse_tariff_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError(origin + ": tariff must be a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) {
    throw ValidationError(origin + ": missing string field 'id'");
  }
  const std::string id = j["id"].get<std::string>();
  const std::string where = origin + " (" + id + ")";

  if (!j.contains("tou_rules") || !j["tou_rules"].is_array() || j["tou_rules"].empty()) {
    throw ValidationError(where + ": 'tou_rules' must be a non-empty array");
  }
  std::vector<std::string> periods;
  std::vector<TouRule> rules;
  for (std::size_t i = 0; i < j["tou_rules"].size(); ++i) {
    const json& r = j["tou_rules"][i];
    const std::string rw = where + ": tou_rules[" + std::to_string(i) + "]";
    if (!r.contains("period") || !r["period"].is_string()) {
      throw ValidationError(rw + ": missing string field 'period'");
    }
    TouRule rule;
    rule.period = r["period"].get<std::string>();
    if (r.contains("months")) {
      for (const auto& m : r["months"]) {
        if (!m.is_number_integer()) throw ValidationError(rw + ": months must be integers");
        rule.months.push_back(m.get<int>());
      }
    }
    try {
      rule.day_class = parse_day_class(r.value("day_class", std::string("all")));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(rw + ": " + e.what());
    }
    if (!r.contains("hour_ranges") || !r["hour_ranges"].is_array()) {
      throw ValidationError(rw + ": missing array field 'hour_ranges'");
    }
    for (const auto& h : r["hour_ranges"]) rule.hour_ranges.push_back(parse_range(h, rw));
    if (std::find(periods.begin(), periods.end(), rule.period) == periods.end()) {
      periods.push_back(rule.period);
    }
    rules.push_back(std::move(rule));
  }

  HourRange window{16, 21};
  if (j.contains("peak_window")) window = parse_range(j["peak_window"], where + ": peak_window");

  auto calendar = [&] {
    try {
      return TouCalendar(periods, std::move(rules), window);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }();

  auto rate_map = [&](const std::string& key, bool required_per_period) {
    std::vector<double> out(periods.size(), 0.0);
    std::vector<bool> seen(periods.size(), false);
    if (!j.contains(key) || !j[key].is_object()) {
      throw ValidationError(where + ": missing object field '" + key + "'");
    }
    for (const auto& [name, value] : j[key].items()) {
      const auto it = std::find(periods.begin(), periods.end(), name);
      if (it == periods.end()) {
        throw ValidationError(where + ": " + key + "." + name +
                              " references a period not defined in tou_rules");
      }
      if (!value.is_number()) throw ValidationError(where + ": " + key + "." + name + " must be a number");
      const auto p = static_cast<std::size_t>(it - periods.begin());
      out[p] = value.get<double>();
      seen[p] = true;
    }
    if (required_per_period) {
      for (std::size_t p = 0; p < periods.size(); ++p) {
        if (!seen[p]) throw ValidationError(where + ": " + key + " has no rate for period '" + periods[p] + "'");
      }
    }
    return out;
  };

  TariffSchedule t{
      .id = id,
      .dr_max = number_field(j, "demand_rate_max", where),
      .dr_tou = rate_map("demand_rates", false),
      .er = rate_map("energy_rates", true),
      .nbc = j.contains("non_bypassable_charge") ? number_field(j, "non_bypassable_charge", where)
                                                 : kDefaultNonBypassable,
      .calendar = std::move(calendar),
  };
  validate(t);
  return t;
}

TariffSchedule load_tariff(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open tariff file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tariff_json(ss.str(), path.string());
}

std::string tariff_to_json(const TariffSchedule& t) {
  json j;
  j["id"] = t.id;
  j["demand_rate_max"] = t.dr_max;
  j["non_bypassable_charge"] = t.nbc;
  const auto& periods = t.calendar.periods();
  for (std::size_t p = 0; p < periods.size(); ++p) {
    j["demand_rates"][periods[p]] = t.dr_tou[p];
    j["energy_rates"][periods[p]] = t.er[p];
  }
  j["tou_rules"] = json::array();
  for (const auto& r : t.calendar.rules()) {
    json jr;
    jr["period"] = r.period;
    jr["months"] = r.months;
    jr["day_class"] = to_string(r.day_class);
    jr["hour_ranges"] = json::array();
    for (const auto& h : r.hour_ranges) jr["hour_ranges"].push_back({h.begin, h.end});
    j["tou_rules"].push_back(jr);
  }
  j["peak_window"] = {t.calendar.peak_window().begin, t.calendar.peak_window().end};
  return j.dump(2);
}

RateSeries rate_series(const TariffSchedule& tariff, const TimeGrid& grid) {
  RateSeries out;
  out.er.resize(grid.count());
  out.nsr.resize(grid.count());
  for (std::size_t t = 0; t < grid.count(); ++t) {
    const double er = tariff.er[tariff.calendar.period_of(grid.at(t))];
    out.er[t] = er;
    out.nsr[t] = er - tariff.nbc;
  }
  return out;
}

BillBreakdown compute_bill(std::span<const double> net, const TariffSchedule& tariff,
                           const TimeGrid& grid) {
  if (net.size() != grid.count()) {
    throw std::invalid_argument("net demand has " + std::to_string(net.size()) +
                                " steps, grid has " + std::to_string(grid.count()));
  }
  const auto& periods = tariff.calendar.periods();
  std::vector<double> period_max(periods.size(), 0.0);
  double d_max = 0.0;
  double energy = 0.0;
  double nem = 0.0;
  for (std::size_t t = 0; t < net.size(); ++t) {
    const double d = net[t];
    const std::size_t p = tariff.calendar.period_of(grid.at(t));
    d_max = std::max(d_max, d);
    period_max[p] = std::max(period_max[p], d);
    const double er = tariff.er[p];
    const double imports = std::max(0.0, d);
    energy += imports * er;
    nem += (d - imports) * (er - tariff.nbc);
  }

  BillBreakdown b;
  b.d_max = d_max;
  b.demand_max_charge = d_max * tariff.dr_max;
  double tou_total = 0.0;
  for (std::size_t p = 0; p < periods.size(); ++p) {
    const double c = period_max[p] * tariff.dr_tou[p];
    b.demand_tou_charges[periods[p]] = c;
    b.d_tou[periods[p]] = period_max[p];
    tou_total += c;
  }
  b.energy_charge = kHoursPerStep * energy;
  b.nem_credit = kHoursPerStep * nem;
  b.total = b.demand_max_charge + tou_total + b.energy_charge + b.nem_credit;
  return b;
}

}  // namespace flexbill
