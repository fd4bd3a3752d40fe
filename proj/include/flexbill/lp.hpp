#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "flexbill/assets.hpp"
#include "flexbill/calendar.hpp"
#include "flexbill/tariff.hpp"

namespace flexbill {

// Equation each LP row (or column bound) encodes in the monthly bill model.
enum class EqTag : std::uint8_t {
  MaxDemand = 2,       // D_net(t) <= D_max
  TouDemand = 3,       // delta(t,p) D_net(t) <= D_tou(p)
  ImportNonneg = 4,    // D_net+(t) >= 0
  ImportCover = 5,     // D_net+(t) >= D_net(t)
  DevBounds = 6,       // lower(t) <= D_dev(t) <= upper(t)
  RollingWindow = 7,   // sum over a recovery window of D_dev >= 0
  HorizonBalance = 8,  // sum of D_dev = 0
  SocUpdate = 9,       // J(t) = J(t-1) + (eta P_cha - P_dis) / 4
  SocInitial = 10,     // J(0) = J_init + (eta P_cha - P_dis) / 4
  SocBounds = 11,      // 0 <= J(t) <= BER
  SocFinal = 12,       // J(T) = J_init
  ChargeBounds = 13,   // 0 <= P_cha <= BPR
  DischargeBounds = 14,
  NoExport = 15,       // P_dis <= D_base + D_dev + P_cha
  NetDemand = 16,      // net-demand identity
};

// "eq2" ... "eq16"
std::string eq_label(EqTag tag);
const std::vector<EqTag>& all_eq_tags();

struct MonthInputs {
  TimeGrid grid;
  std::vector<double> d_base;
  std::vector<double> p_pv;
  std::optional<BatterySpec> battery;
  std::optional<FlexSpec> flex;

  bool has_battery() const { return battery && battery->present(); }
  bool has_flex() const { return flex && flex->present(); }
};

// Column positions. Asset blocks are absent when the asset is.
class VarLayout {
 public:
  VarLayout() = default;
  VarLayout(std::size_t steps, std::size_t periods, bool flex, bool battery);

  std::size_t steps() const { return steps_; }
  std::size_t periods() const { return periods_; }
  bool has_flex() const { return flex_; }
  bool has_battery() const { return battery_; }
  std::size_t count() const { return count_; }

  std::size_t d_net(std::size_t t) const { return t; }
  std::size_t d_pos(std::size_t t) const { return steps_ + t; }
  std::size_t d_dev(std::size_t t) const { return dev_ + t; }
  std::size_t p_cha(std::size_t t) const { return cha_ + t; }
  std::size_t p_dis(std::size_t t) const { return dis_ + t; }
  std::size_t soc(std::size_t t) const { return soc_ + t; }
  std::size_t d_max() const { return max_; }
  std::size_t d_tou(std::size_t p) const { return max_ + 1 + p; }

  std::string name(std::size_t col, const std::vector<std::string>& period_names) const;

 private:
  std::size_t steps_ = 0, periods_ = 0;
  bool flex_ = false, battery_ = false;
  std::size_t dev_ = 0, cha_ = 0, dis_ = 0, soc_ = 0, max_ = 0, count_ = 0;
};

// min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
// A is stored row-wise.
struct LpInstance {
  VarLayout layout;
  std::vector<std::string> period_names;

  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;

  std::vector<std::size_t> row_start{0};
  std::vector<int> row_index;
  std::vector<double> row_value;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
  std::vector<EqTag> row_tag;

  std::size_t col_count() const { return cost.size(); }
  std::size_t row_count() const { return row_lower.size(); }
  std::size_t nonzeros() const { return row_value.size(); }
  std::size_t rows_tagged(EqTag tag) const;

  void add_row(EqTag tag, std::span<const int> index, std::span<const double> value, double lower,
               double upper);
};

LpInstance build_lp(const MonthInputs& inputs, const TariffSchedule& tariff);

// CPLEX LP-format text for cross-checking with external solvers.
void write_lp_format(const LpInstance& lp, std::ostream& out);

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };
std::string to_string(SolveStatus s);

struct SolveOptions {
  double tol = 1e-7;
  bool verbose = false;
};

struct Tightness {
  std::vector<std::size_t> max_active_steps;             // rows with D_net(t) = D_max
  std::vector<std::size_t> tou_active_count;             // per period
};

struct DispatchSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::string detail;
  double objective_value = 0.0;

  std::vector<double> d_net;
  std::vector<double> d_net_pos;
  std::vector<double> d_dev;  // zeros when flex is absent
  std::vector<double> p_cha;  // zeros when the battery is absent
  std::vector<double> p_dis;
  std::vector<double> soc;
  double d_max = 0.0;
  std::vector<double> d_tou;

  Tightness tightness;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

DispatchSolution solve_lp(const LpInstance& lp, const SolveOptions& options = {});

struct VerificationReport {
  std::map<EqTag, double> max_residual;  // absolute, kW or kWh
  double objective = 0.0;
  double oracle_bill = 0.0;
  double oracle_gap = 0.0;          // |bill - objective| / max(1, |objective|)
  bool oracle_applicable = false;   // all demand rates > 0 and nbc > 0
  std::vector<std::size_t> simultaneous_steps;  // P_cha * P_dis > tol
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kBalanceTol = 1e-4;
inline constexpr double kObjectiveRelTol = 1e-6;

VerificationReport verify_solution(const DispatchSolution& solution, const MonthInputs& inputs,
                                   const TariffSchedule& tariff, double tol = kFeasibilityTol);

}  // namespace flexbill
