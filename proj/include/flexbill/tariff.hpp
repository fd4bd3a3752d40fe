#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexbill/calendar.hpp"

namespace flexbill {

// Rejected input data (tariff files, profiles, configs). Messages name the
// offending field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultNonBypassable = 0.025;  // $/kWh

struct TariffSchedule {
  std::string id;
  double dr_max = 0.0;            // $/kW on the monthly maximum demand
  std::vector<double> dr_tou;     // $/kW per period, aligned with calendar.periods()
  std::vector<double> er;         // $/kWh per period
  double nbc = kDefaultNonBypassable;
  TouCalendar calendar;

  double tou_demand_rate(const std::string& period) const;
  double energy_rate(const std::string& period) const;
  bool all_demand_rates_positive() const;
};

// Throws ValidationError on any invariant violation.
void validate(const TariffSchedule& tariff);

TariffSchedule load_tariff(const std::filesystem::path& path);
TariffSchedule parse_tariff_json(const std::string& text, const std::string& origin = "<string>");
std::string tariff_to_json(const TariffSchedule& tariff);

struct RateSeries {
  std::vector<double> er;   // ER(t)
  std::vector<double> nsr;  // NSR(t) = ER(t) - nbc
};

RateSeries rate_series(const TariffSchedule& tariff, const TimeGrid& grid);

struct BillBreakdown {
  double demand_max_charge = 0.0;
  std::map<std::string, double> demand_tou_charges;
  double energy_charge = 0.0;
  double nem_credit = 0.0;  // <= 0
  double total = 0.0;

  // tight demand values behind the charges
  double d_max = 0.0;
  std::map<std::string, double> d_tou;
};

// Monthly bill of a net-demand series (kW per 15-minute step), evaluated with
// the tight max-demand and import values. Independent of the LP.
BillBreakdown compute_bill(std::span<const double> net_demand, const TariffSchedule& tariff,
                           const TimeGrid& grid);

}  // namespace flexbill
