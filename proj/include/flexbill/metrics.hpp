#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexbill/calendar.hpp"
#include "flexbill/lp.hpp"

namespace flexbill {

struct AnnualResult {
  std::string tariff_id;
  std::string asset_label;
  std::vector<TimeGrid> grids;
  std::vector<DispatchSolution> months;
  std::vector<VerificationReport> reports;
  std::vector<double> d_net;                  // months concatenated
  std::vector<std::size_t> month_starts;      // offset of each month in d_net
  Mask peak;                                  // concatenated peak mask
  double annual_bill = 0.0;
};

struct MetricSet {
  double mean_peak_ramp = 0.0;  // kW per 15-minute step
  double mean_peak_net_demand = 0.0;
  double total_bill = 0.0;
};

// Mean |D(t) - D(t-1)| over masked steps t > 0. The predecessor may lie
// outside the mask; pairs whose t is listed in segment_starts (a month
// boundary) are skipped.
double peak_ramp_mean(std::span<const double> d_net, std::span<const std::uint8_t> mask,
                      std::span<const std::size_t> segment_starts = {});

double peak_net_mean(std::span<const double> d_net, std::span<const std::uint8_t> mask);

MetricSet compute_metrics(const AnnualResult& result);

// Componentwise storage / base; nullopt when |base| < 1e-9.
struct RatioSet {
  std::optional<double> bill;
  std::optional<double> ramp;
  std::optional<double> net;
};

inline constexpr double kRatioGuard = 1e-9;

std::optional<double> safe_ratio(double num, double den);
RatioSet relative_metrics(const MetricSet& storage, const MetricSet& base);

}  // namespace flexbill
