#pragma once

#include <random>

#include "flexbill/lp.hpp"
#include "support/enumeration.hpp"
#include "support/fixtures.hpp"

namespace flexbill::testing {

// Eight quarter-hours starting Monday 2021-01-04 00:00: steps 0..3 fall in
// period "a", 4..7 in period "b".
struct ToyFlexCase {
  TariffSchedule tariff;
  MonthInputs inputs;
  EnumProblem problem;
};

inline ToyFlexCase make_toy_flex_case(double base, std::vector<double> pv, double flex_pct,
                                      int window_steps, const TariffSchedule& tariff) {
  const TimeGrid grid(2021, 1, 4, 8);
  MonthInputs in{grid, std::vector<double>(8, base), pv, std::nullopt,
                 FlexSpec{flex_pct, 0.25 * window_steps}};
  EnumProblem p;
  p.base = base;
  p.pv = pv;
  p.k_max = static_cast<int>(std::lround(flex_pct / 0.05));
  p.window = window_steps;
  p.dr_max = tariff.dr_max;
  p.dr_tou = tariff.dr_tou;
  const auto rs = rate_series(tariff, grid);
  p.er = rs.er;
  p.nsr = rs.nsr;
  const auto periods = period_series(tariff.calendar, grid);
  p.period.assign(periods.begin(), periods.end());
  return {tariff, std::move(in), std::move(p)};
}

inline ToyFlexCase random_toy_flex_case(std::mt19937_64& rng, double flex_pct, int window_steps) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double base = 20.0 + 80.0 * u(rng);
  std::vector<double> pv(8);
  for (auto& v : pv) v = 1.3 * base * u(rng);
  const double nbc = 0.04 * u(rng);
  const auto tariff = two_period_tariff(20.0 * u(rng), 15.0 * u(rng), 15.0 * u(rng),
                                        nbc + 0.01 + 0.45 * u(rng), nbc + 0.01 + 0.45 * u(rng), nbc);
  return make_toy_flex_case(base, std::move(pv), flex_pct, window_steps, tariff);
}

}  // namespace flexbill::testing
