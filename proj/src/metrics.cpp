#include "flexbill/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flexbill {

double peak_ramp_mean(std::span<const double> d_net, std::span<const std::uint8_t> mask,
                      std::span<const std::size_t> segment_starts) {
  if (mask.size() != d_net.size()) throw std::invalid_argument("peak mask length differs from series length");
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
    throw std::invalid_argument("peak mask is empty");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t < d_net.size(); ++t) {
    if (!mask[t]) continue;
    if (std::find(segment_starts.begin(), segment_starts.end(), t) != segment_starts.end()) continue;
    sum += std::abs(d_net[t] - d_net[t - 1]);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("peak mask selects no step with a predecessor");
  return sum / static_cast<double>(count);
}

double peak_net_mean(std::span<const double> d_net, std::span<const std::uint8_t> mask) {
  if (mask.size() != d_net.size()) throw std::invalid_argument("peak mask length differs from series length");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < d_net.size(); ++t) {
    if (!mask[t]) continue;
    sum += d_net[t];
    ++count;
  }
  if (count == 0) throw std::invalid_argument("peak mask is empty");
  return sum / static_cast<double>(count);
}

MetricSet compute_metrics(const AnnualResult& r) {
  return {peak_ramp_mean(r.d_net, r.peak, r.month_starts), peak_net_mean(r.d_net, r.peak), r.annual_bill};
}

std::optional<double> safe_ratio(double num, double den) {
  if (!std::isfinite(num) || !std::isfinite(den) || std::abs(den) < kRatioGuard) return std::nullopt;
  return num / den;
}

RatioSet relative_metrics(const MetricSet& storage, const MetricSet& base) {
  return {safe_ratio(storage.total_bill, base.total_bill),
          safe_ratio(storage.mean_peak_ramp, base.mean_peak_ramp),
          safe_ratio(storage.mean_peak_net_demand, base.mean_peak_net_demand)};
}

}  // namespace flexbill
