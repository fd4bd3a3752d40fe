#include "flexbill/lp.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <stdexcept>

namespace flexbill {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string eq_label(EqTag tag) { return "eq" + std::to_string(static_cast<int>(tag)); }

const std::vector<EqTag>& all_eq_tags() {
  static const std::vector<EqTag> tags = {
      EqTag::MaxDemand,     EqTag::TouDemand,      EqTag::ImportNonneg, EqTag::ImportCover,
      EqTag::DevBounds,     EqTag::RollingWindow,  EqTag::HorizonBalance, EqTag::SocUpdate,
      EqTag::SocInitial,    EqTag::SocBounds,      EqTag::SocFinal,     EqTag::ChargeBounds,
      EqTag::DischargeBounds, EqTag::NoExport,     EqTag::NetDemand};
  return tags;
}

VarLayout::VarLayout(std::size_t steps, std::size_t periods, bool flex, bool battery)
    : steps_(steps), periods_(periods), flex_(flex), battery_(battery) {
  std::size_t next = 2 * steps;
  if (flex) {
    dev_ = next;
    next += steps;
  }
  if (battery) {
    cha_ = next;
    dis_ = next + steps;
    soc_ = next + 2 * steps;
    next += 3 * steps;
  }
  max_ = next;
  count_ = next + 1 + periods;
}

std::string VarLayout::name(std::size_t col, const std::vector<std::string>& period_names) const {
  auto indexed = [](const char* base, std::size_t t) { return std::string(base) + "_" + std::to_string(t); };
  if (col < steps_) return indexed("d_net", col);
  if (col < 2 * steps_) return indexed("d_pos", col - steps_);
  if (col == max_) return "d_max";
  if (col > max_) {
    std::string p = period_names.at(col - max_ - 1);
    std::replace_if(p.begin(), p.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)); }, '_');
    return "d_tou_" + p;
  }
  if (flex_ && col >= dev_ && col < dev_ + steps_) return indexed("d_dev", col - dev_);
  if (battery_) {
    if (col >= cha_ && col < cha_ + steps_) return indexed("p_cha", col - cha_);
    if (col >= dis_ && col < dis_ + steps_) return indexed("p_dis", col - dis_);
    if (col >= soc_ && col < soc_ + steps_) return indexed("soc", col - soc_);
  }
  throw std::out_of_range("column " + std::to_string(col) + " outside layout");
}

std::size_t LpInstance::rows_tagged(EqTag tag) const {
  return static_cast<std::size_t>(std::count(row_tag.begin(), row_tag.end(), tag));
}

void LpInstance::add_row(EqTag tag, std::span<const int> index, std::span<const double> value,
                         double lower, double upper) {
  row_index.insert(row_index.end(), index.begin(), index.end());
  row_value.insert(row_value.end(), value.begin(), value.end());
  row_start.push_back(row_index.size());
  row_lower.push_back(lower);
  row_upper.push_back(upper);
  row_tag.push_back(tag);
}

LpInstance build_lp(const MonthInputs& in, const TariffSchedule& tariff) {
  const std::size_t n = in.grid.count();
  if (in.d_base.size() != n || in.p_pv.size() != n) {
    throw std::invalid_argument("build_lp: load/PV series length does not match the grid (" +
                                std::to_string(n) + " steps)");
  }
  const bool flex = in.has_flex();
  const bool battery = in.has_battery();
  if (in.flex) validate(*in.flex);
  if (in.battery) validate(*in.battery);
  std::size_t delta = 0;
  if (flex) {
    delta = in.flex->delta_steps();
    if (delta > n) {
      throw std::invalid_argument("build_lp: recovery window of " + std::to_string(delta) +
                                  " steps exceeds the month's " + std::to_string(n) + " steps");
    }
  }

  const auto& cal = tariff.calendar;
  const std::size_t periods = cal.period_count();
  const auto rates = rate_series(tariff, in.grid);
  for (double v : rates.nsr) {
    if (v < 0.0) throw std::invalid_argument("build_lp: negative NEM sell rate");
  }
  const auto period_of = period_series(cal, in.grid);

  LpInstance lp;
  lp.layout = VarLayout(n, periods, flex, battery);
  lp.period_names = cal.periods();
  const auto& L = lp.layout;
  const std::size_t cols = L.count();
  lp.cost.assign(cols, 0.0);
  lp.col_lower.assign(cols, -kInf);
  lp.col_upper.assign(cols, kInf);

  // Objective: D+ ER/4 + (D_net - D+) NSR/4 regrouped per column.
  for (std::size_t t = 0; t < n; ++t) {
    lp.cost[L.d_net(t)] = kHoursPerStep * rates.nsr[t];
    lp.cost[L.d_pos(t)] = kHoursPerStep * (rates.er[t] - rates.nsr[t]);
    lp.col_lower[L.d_pos(t)] = 0.0;  // imports nonnegative
  }
  lp.cost[L.d_max()] = tariff.dr_max;
  // A month of pure export owes no maximum-demand charge.
  lp.col_lower[L.d_max()] = 0.0;
  for (std::size_t p = 0; p < periods; ++p) {
    lp.cost[L.d_tou(p)] = tariff.dr_tou[p];
    // steps outside period p contribute 0 <= D_tou(p)
    lp.col_lower[L.d_tou(p)] = 0.0;
  }

  FlexBounds bounds;
  if (flex) {
    bounds = flex_bounds(*in.flex, in.d_base);
    for (std::size_t t = 0; t < n; ++t) {
      lp.col_lower[L.d_dev(t)] = bounds.lower[t];
      lp.col_upper[L.d_dev(t)] = bounds.upper[t];
    }
  }
  if (battery) {
    const auto& b = *in.battery;
    for (std::size_t t = 0; t < n; ++t) {
      lp.col_lower[L.p_cha(t)] = 0.0;
      lp.col_upper[L.p_cha(t)] = b.bpr;
      lp.col_lower[L.p_dis(t)] = 0.0;
      lp.col_upper[L.p_dis(t)] = b.bpr;
      lp.col_lower[L.soc(t)] = 0.0;
      lp.col_upper[L.soc(t)] = b.ber;
    }
  }

  const auto col = [](std::size_t c) { return static_cast<int>(c); };

  // Net-demand identity: D_net - D_dev - P_cha + P_dis = D_base - P_pv.
  for (std::size_t t = 0; t < n; ++t) {
    std::array<int, 4> idx{};
    std::array<double, 4> val{};
    std::size_t k = 0;
    idx[k] = col(L.d_net(t));
    val[k++] = 1.0;
    if (flex) {
      idx[k] = col(L.d_dev(t));
      val[k++] = -1.0;
    }
    if (battery) {
      idx[k] = col(L.p_cha(t));
      val[k++] = -1.0;
      idx[k] = col(L.p_dis(t));
      val[k++] = 1.0;
    }
    const double rhs = in.d_base[t] - in.p_pv[t];
    lp.add_row(EqTag::NetDemand, std::span(idx.data(), k), std::span(val.data(), k), rhs, rhs);
  }

  for (std::size_t t = 0; t < n; ++t) {
    const std::array<int, 2> idx{col(L.d_net(t)), col(L.d_max())};
    const std::array<double, 2> val{1.0, -1.0};
    lp.add_row(EqTag::MaxDemand, idx, val, -kInf, 0.0);
  }
  for (std::size_t t = 0; t < n; ++t) {
    const std::array<int, 2> idx{col(L.d_net(t)), col(L.d_tou(period_of[t]))};
    const std::array<double, 2> val{1.0, -1.0};
    lp.add_row(EqTag::TouDemand, idx, val, -kInf, 0.0);
  }
  for (std::size_t t = 0; t < n; ++t) {
    const std::array<int, 2> idx{col(L.d_pos(t)), col(L.d_net(t))};
    const std::array<double, 2> val{1.0, -1.0};
    lp.add_row(EqTag::ImportCover, idx, val, 0.0, kInf);
  }

  if (flex) {
    std::vector<int> idx(delta);
    const std::vector<double> ones(std::max(delta, n), 1.0);
    for (std::size_t k = 0; k + delta <= n; ++k) {
      for (std::size_t j = 0; j < delta; ++j) idx[j] = col(L.d_dev(k + j));
      lp.add_row(EqTag::RollingWindow, idx, std::span(ones.data(), delta), 0.0, kInf);
    }
    idx.resize(n);
    for (std::size_t t = 0; t < n; ++t) idx[t] = col(L.d_dev(t));
    lp.add_row(EqTag::HorizonBalance, idx, std::span(ones.data(), n), 0.0, 0.0);
  }

  if (battery) {
    const auto& b = *in.battery;
    const double charge = -kHoursPerStep * b.eta;
    const double discharge = kHoursPerStep;
    for (std::size_t t = 0; t < n; ++t) {
      if (t == 0) {
        const std::array<int, 3> idx{col(L.soc(0)), col(L.p_cha(0)), col(L.p_dis(0))};
        const std::array<double, 3> val{1.0, charge, discharge};
        lp.add_row(EqTag::SocInitial, idx, val, b.j_init, b.j_init);
      } else {
        const std::array<int, 4> idx{col(L.soc(t)), col(L.soc(t - 1)), col(L.p_cha(t)), col(L.p_dis(t))};
        const std::array<double, 4> val{1.0, -1.0, charge, discharge};
        lp.add_row(EqTag::SocUpdate, idx, val, 0.0, 0.0);
      }
    }
    {
      const std::array<int, 1> idx{col(L.soc(n - 1))};
      const std::array<double, 1> val{1.0};
      lp.add_row(EqTag::SocFinal, idx, val, b.j_init, b.j_init);
    }
    // P_dis - D_dev - P_cha <= D_base
    for (std::size_t t = 0; t < n; ++t) {
      std::array<int, 3> idx{};
      std::array<double, 3> val{};
      std::size_t k = 0;
      idx[k] = col(L.p_dis(t));
      val[k++] = 1.0;
      idx[k] = col(L.p_cha(t));
      val[k++] = -1.0;
      if (flex) {
        idx[k] = col(L.d_dev(t));
        val[k++] = -1.0;
      }
      lp.add_row(EqTag::NoExport, std::span(idx.data(), k), std::span(val.data(), k), -kInf, in.d_base[t]);
    }
  }
  return lp;
}

}  // namespace flexbill
