#include <algorithm>
#include <cmath>

#include "Highs.h"
#include "flexbill/lp.hpp"

namespace flexbill {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "numerical_failure";
}

DispatchSolution solve_lp(const LpInstance& lp, const SolveOptions& options) {
  DispatchSolution sol;
  const auto& L = lp.layout;

  Highs highs;
  highs.setOptionValue("output_flag", options.verbose);
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("random_seed", 0);
  highs.setOptionValue("primal_feasibility_tolerance", options.tol);
  highs.setOptionValue("dual_feasibility_tolerance", options.tol);
  highs.setOptionValue("solver", "simplex");

  std::vector<HighsInt> start(lp.row_start.begin(), lp.row_start.end());
  const std::vector<HighsInt> index(lp.row_index.begin(), lp.row_index.end());
  const auto status = highs.passModel(
      static_cast<HighsInt>(lp.col_count()), static_cast<HighsInt>(lp.row_count()),
      static_cast<HighsInt>(lp.nonzeros()), static_cast<HighsInt>(MatrixFormat::kRowwise),
      static_cast<HighsInt>(ObjSense::kMinimize), 0.0, lp.cost.data(), lp.col_lower.data(),
      lp.col_upper.data(), lp.row_lower.data(), lp.row_upper.data(), start.data(), index.data(),
      lp.row_value.data());
  if (status == HighsStatus::kError) {
    sol.status = SolveStatus::NumericalFailure;
    sol.detail = "model rejected by the LP backend";
    return sol;
  }

  const auto run = highs.run();
  const auto model_status = highs.getModelStatus();
  sol.detail = highs.modelStatusToString(model_status);
  switch (model_status) {
    case HighsModelStatus::kOptimal:
      sol.status = SolveStatus::Optimal;
      break;
    case HighsModelStatus::kInfeasible:
      sol.status = SolveStatus::Infeasible;
      return sol;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible:
      sol.status = SolveStatus::Unbounded;
      return sol;
    default:
      sol.status = SolveStatus::NumericalFailure;
      return sol;
  }
  if (run == HighsStatus::kError) {
    sol.status = SolveStatus::NumericalFailure;
    return sol;
  }

  const auto& x = highs.getSolution().col_value;
  const auto& info = highs.getInfo();
  sol.iterations = static_cast<int>(info.simplex_iteration_count);
  sol.objective_value = info.objective_function_value;

  const std::size_t n = L.steps();
  auto block = [&](auto pos, bool present) {
    std::vector<double> v(n, 0.0);
    if (present) {
      for (std::size_t t = 0; t < n; ++t) v[t] = x[pos(t)];
    }
    return v;
  };
  sol.d_net = block([&](std::size_t t) { return L.d_net(t); }, true);
  sol.d_net_pos = block([&](std::size_t t) { return L.d_pos(t); }, true);
  sol.d_dev = block([&](std::size_t t) { return L.d_dev(t); }, L.has_flex());
  sol.p_cha = block([&](std::size_t t) { return L.p_cha(t); }, L.has_battery());
  sol.p_dis = block([&](std::size_t t) { return L.p_dis(t); }, L.has_battery());
  sol.soc = block([&](std::size_t t) { return L.soc(t); }, L.has_battery());
  sol.d_max = x[L.d_max()];
  sol.d_tou.resize(L.periods());
  for (std::size_t p = 0; p < L.periods(); ++p) sol.d_tou[p] = x[L.d_tou(p)];

  // Active demand rows, read off the row list.
  sol.tightness.tou_active_count.assign(L.periods(), 0);
  const double tight = 1e-6;
  for (std::size_t r = 0; r < lp.row_count(); ++r) {
    if (lp.row_tag[r] != EqTag::MaxDemand && lp.row_tag[r] != EqTag::TouDemand) continue;
    const auto b = lp.row_start[r];
    const std::size_t step = static_cast<std::size_t>(lp.row_index[b]);
    const std::size_t bound_col = static_cast<std::size_t>(lp.row_index[b + 1]);
    if (std::abs(x[step] - x[bound_col]) > tight) continue;
    if (lp.row_tag[r] == EqTag::MaxDemand) {
      sol.tightness.max_active_steps.push_back(step);
    } else {
      ++sol.tightness.tou_active_count[bound_col - L.d_tou(0)];
    }
  }
  return sol;
}

}  // namespace flexbill
