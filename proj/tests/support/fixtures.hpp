#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "flexbill/lp.hpp"
#include "flexbill/tariff.hpp"

namespace flexbill::testing {

inline std::filesystem::path source_dir() { return FLEXBILL_SOURCE_DIR; }
inline std::filesystem::path bundled(const std::string& name) { return source_dir() / "bundled" / name; }

// One period ("all") covering every hour.
inline TariffSchedule flat_tariff(double dr_max, double dr_tou, double er, double nbc) {
  TouCalendar cal({"all"}, {TouRule{"all", {}, DayClass::All, {{0, 24}}}});
  TariffSchedule t{"flat", dr_max, {dr_tou}, {er}, nbc, cal};
  validate(t);
  return t;
}

// Two periods: "a" for hour 0, "b" for the rest of the day.
inline TariffSchedule two_period_tariff(double dr_max, double dr_a, double dr_b, double er_a,
                                        double er_b, double nbc) {
  TouCalendar cal({"a", "b"}, {TouRule{"a", {}, DayClass::All, {{0, 1}}},
                               TouRule{"b", {}, DayClass::All, {{1, 24}}}});
  TariffSchedule t{"two_period", dr_max, {dr_a, dr_b}, {er_a, er_b}, nbc, cal};
  validate(t);
  return t;
}

// Same structure as the bundled pair, random rates satisfying the invariants.
inline TariffSchedule random_tariff(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> demand(0.5, 20.0), energy(0.03, 0.45), nbc(0.005, 0.03);
  auto t = load_tariff(bundled("base_b19.json"));
  t.id = "random";
  t.dr_max = demand(rng);
  t.nbc = nbc(rng);
  for (auto& r : t.dr_tou) r = demand(rng);
  for (auto& r : t.er) r = t.nbc + energy(rng);
  validate(t);
  return t;
}

// Smooth positive load with daily shape and AR(1) noise.
inline std::vector<double> random_load(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> out(n);
  double ar = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double hour = static_cast<double>(t % 96) / 4.0;
    ar = 0.9 * ar + noise(rng);
    const double shape = 0.55 + 0.35 * std::exp(-std::pow((hour - 10.0) / 3.0, 2)) +
                         0.4 * std::exp(-std::pow((hour - 18.0) / 2.5, 2));
    out[t] = std::max(0.0, scale * (shape + ar));
  }
  return out;
}

inline std::vector<double> random_pv(std::mt19937_64& rng, std::size_t n, double peak) {
  std::uniform_real_distribution<double> cloud(0.3, 1.0);
  std::vector<double> out(n, 0.0);
  double day_factor = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t % 96 == 0) day_factor = cloud(rng);
    const double hour = static_cast<double>(t % 96) / 4.0;
    if (hour > 6.5 && hour < 19.5) out[t] = peak * day_factor * std::sin(M_PI * (hour - 6.5) / 13.0);
  }
  return out;
}

}  // namespace flexbill::testing
