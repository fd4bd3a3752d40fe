#include <algorithm>
#include <cmath>
#include <sstream>

#include "flexbill/lp.hpp"

namespace flexbill {

namespace {

double below(double value, double lo) { return std::max(0.0, lo - value); }
double above(double value, double hi) { return std::max(0.0, value - hi); }

}  // namespace

VerificationReport verify_solution(const DispatchSolution& s, const MonthInputs& in,
                                   const TariffSchedule& tariff, double tol) {
  VerificationReport rep;
  rep.objective = s.objective_value;
  if (!s.optimal()) {
    rep.failures.push_back("solution status is " + to_string(s.status));
    return rep;
  }
  const std::size_t n = in.grid.count();
  if (s.d_net.size() != n || s.d_net_pos.size() != n || s.d_dev.size() != n ||
      s.p_cha.size() != n || s.p_dis.size() != n || s.soc.size() != n ||
      s.d_tou.size() != tariff.calendar.period_count()) {
    rep.failures.push_back("solution series do not match the grid");
    return rep;
  }

  const bool flex = in.has_flex();
  const bool battery = in.has_battery();
  auto bump = [&](EqTag tag, double r) {
    auto& slot = rep.max_residual[tag];
    slot = std::max(slot, r);
  };
  rep.max_residual[EqTag::MaxDemand] = 0.0;
  rep.max_residual[EqTag::TouDemand] = 0.0;
  rep.max_residual[EqTag::ImportNonneg] = 0.0;
  rep.max_residual[EqTag::ImportCover] = 0.0;
  rep.max_residual[EqTag::NetDemand] = 0.0;

  const auto periods = period_series(tariff.calendar, in.grid);

  bump(EqTag::MaxDemand, below(s.d_max, 0.0));
  for (double v : s.d_tou) bump(EqTag::TouDemand, below(v, 0.0));
  for (std::size_t t = 0; t < n; ++t) {
    bump(EqTag::MaxDemand, above(s.d_net[t], s.d_max));
    bump(EqTag::TouDemand, above(s.d_net[t], s.d_tou[periods[t]]));
    bump(EqTag::ImportNonneg, below(s.d_net_pos[t], 0.0));
    bump(EqTag::ImportCover, below(s.d_net_pos[t], s.d_net[t]));
    const double dev = flex ? s.d_dev[t] : 0.0;
    const double cha = battery ? s.p_cha[t] : 0.0;
    const double dis = battery ? s.p_dis[t] : 0.0;
    const double expected = in.d_base[t] + dev - in.p_pv[t] + cha - dis;
    bump(EqTag::NetDemand, std::abs(s.d_net[t] - expected));
  }

  if (flex) {
    const auto b = flex_bounds(*in.flex, in.d_base);
    const std::size_t delta = in.flex->delta_steps();
    rep.max_residual[EqTag::DevBounds] = 0.0;
    rep.max_residual[EqTag::RollingWindow] = 0.0;
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      bump(EqTag::DevBounds, std::max(below(s.d_dev[t], b.lower[t]), above(s.d_dev[t], b.upper[t])));
      total += s.d_dev[t];
    }
    // windows fully inside the month, summed directly
    for (std::size_t k = 0; k + delta <= n; ++k) {
      double w = 0.0;
      for (std::size_t j = 0; j < delta; ++j) w += s.d_dev[k + j];
      bump(EqTag::RollingWindow, below(w, 0.0));
    }
    rep.max_residual[EqTag::HorizonBalance] = std::abs(total);
  } else if (std::any_of(s.d_dev.begin(), s.d_dev.end(), [](double v) { return v != 0.0; })) {
    rep.failures.push_back("demand deviation reported without a flexibility asset");
  }

  if (battery) {
    const auto& bat = *in.battery;
    for (const auto tag : {EqTag::SocUpdate, EqTag::SocInitial, EqTag::SocBounds, EqTag::SocFinal,
                           EqTag::ChargeBounds, EqTag::DischargeBounds, EqTag::NoExport}) {
      rep.max_residual[tag] = 0.0;
    }
    for (std::size_t t = 0; t < n; ++t) {
      const double prev = t == 0 ? bat.j_init : s.soc[t - 1];
      const double step = kHoursPerStep * (bat.eta * s.p_cha[t] - s.p_dis[t]);
      bump(t == 0 ? EqTag::SocInitial : EqTag::SocUpdate, std::abs(s.soc[t] - prev - step));
      bump(EqTag::SocBounds, std::max(below(s.soc[t], 0.0), above(s.soc[t], bat.ber)));
      bump(EqTag::ChargeBounds, std::max(below(s.p_cha[t], 0.0), above(s.p_cha[t], bat.bpr)));
      bump(EqTag::DischargeBounds, std::max(below(s.p_dis[t], 0.0), above(s.p_dis[t], bat.bpr)));
      const double dev = flex ? s.d_dev[t] : 0.0;
      bump(EqTag::NoExport, above(s.p_dis[t], in.d_base[t] + dev + s.p_cha[t]));
      if (s.p_cha[t] * s.p_dis[t] > tol) rep.simultaneous_steps.push_back(t);
    }
    rep.max_residual[EqTag::SocFinal] = std::abs(s.soc[n - 1] - bat.j_init);
  } else if (std::any_of(s.p_cha.begin(), s.p_cha.end(), [](double v) { return v != 0.0; }) ||
             std::any_of(s.p_dis.begin(), s.p_dis.end(), [](double v) { return v != 0.0; })) {
    rep.failures.push_back("battery power reported without a battery");
  }

  for (const auto& [tag, r] : rep.max_residual) {
    const double limit = tag == EqTag::HorizonBalance ? std::max(tol, kBalanceTol) : tol;
    if (!(r <= limit)) {
      std::ostringstream os;
      os << eq_label(tag) << " residual " << r << " exceeds " << limit;
      rep.failures.push_back(os.str());
    }
  }

  rep.oracle_bill = compute_bill(s.d_net, tariff, in.grid).total;
  rep.oracle_gap = std::abs(rep.oracle_bill - s.objective_value) / std::max(1.0, std::abs(s.objective_value));
  rep.oracle_applicable = tariff.all_demand_rates_positive() && tariff.nbc > 0.0;
  if (rep.oracle_applicable && !(rep.oracle_gap <= kObjectiveRelTol)) {
    std::ostringstream os;
    os << "oracle bill " << rep.oracle_bill << " differs from LP objective " << s.objective_value
       << " (relative gap " << rep.oracle_gap << ")";
    rep.failures.push_back(os.str());
  }
  return rep;
}

}  // namespace flexbill
