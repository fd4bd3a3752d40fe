#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "flexbill/assets.hpp"
#include "flexbill/calendar.hpp"
#include "flexbill/lp.hpp"
#include "flexbill/metrics.hpp"
#include "flexbill/sweep.hpp"
#include "flexbill/tariff.hpp"

namespace py = pybind11;
using namespace flexbill;

namespace {

MonthInputs month_inputs(const TimeGrid& grid, std::vector<double> d_base, std::vector<double> p_pv,
                         std::optional<BatterySpec> battery, std::optional<FlexSpec> flex) {
  if (p_pv.empty()) p_pv.assign(d_base.size(), 0.0);
  return MonthInputs{grid, std::move(d_base), std::move(p_pv), std::move(battery), std::move(flex)};
}

std::map<std::string, std::size_t> row_counts(const LpInstance& lp) {
  std::map<std::string, std::size_t> out;
  for (auto tag : all_eq_tags()) out[eq_label(tag)] = lp.rows_tagged(tag);
  return out;
}

std::map<std::string, double> residuals(const VerificationReport& r) {
  std::map<std::string, double> out;
  for (const auto& [tag, v] : r.max_residual) out[eq_label(tag)] = v;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monthly bill-minimising dispatch of flexible demand and batteries";
  m.attr("__version__") = version_string();

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<int, int>(), py::arg("year"), py::arg("month"))
      .def(py::init<int, int, int, std::size_t>(), py::arg("year"), py::arg("month"),
           py::arg("first_day"), py::arg("steps"))
      .def_property_readonly("year", &TimeGrid::year)
      .def_property_readonly("month", &TimeGrid::month)
      .def_property_readonly("first_day", &TimeGrid::first_day)
      .def_property_readonly("full_month", &TimeGrid::full_month)
      .def("__len__", &TimeGrid::count)
      .def("iso", [](const TimeGrid& g, std::size_t t) {
        if (t >= g.count()) throw py::index_error("step out of range");
        return g.at(t).iso();
      })
      .def("__repr__", [](const TimeGrid& g) {
        std::ostringstream os;
        os << "TimeGrid(" << g.year() << ", " << g.month() << ", steps=" << g.count() << ")";
        return os.str();
      });

  py::class_<TariffSchedule>(m, "TariffSchedule")
      .def_readonly("id", &TariffSchedule::id)
      .def_readonly("dr_max", &TariffSchedule::dr_max)
      .def_readonly("dr_tou", &TariffSchedule::dr_tou)
      .def_readonly("er", &TariffSchedule::er)
      .def_readonly("nbc", &TariffSchedule::nbc)
      .def_property_readonly("periods", [](const TariffSchedule& t) { return t.calendar.periods(); })
      .def("period_series",
           [](const TariffSchedule& t, const TimeGrid& g) { return period_series(t.calendar, g); })
      .def("peak_mask", [](const TariffSchedule& t, const TimeGrid& g) { return peak_mask(t.calendar, g); })
      .def("to_json", &tariff_to_json);

  m.def("load_tariff", &load_tariff, py::arg("path"));
  m.def("parse_tariff_json", &parse_tariff_json, py::arg("text"), py::arg("origin") = "<string>");

  py::class_<BillBreakdown>(m, "BillBreakdown")
      .def_readonly("demand_max_charge", &BillBreakdown::demand_max_charge)
      .def_readonly("demand_tou_charges", &BillBreakdown::demand_tou_charges)
      .def_readonly("energy_charge", &BillBreakdown::energy_charge)
      .def_readonly("nem_credit", &BillBreakdown::nem_credit)
      .def_readonly("total", &BillBreakdown::total)
      .def_readonly("d_max", &BillBreakdown::d_max)
      .def_readonly("d_tou", &BillBreakdown::d_tou);

  m.def("compute_bill",
        [](const std::vector<double>& net, const TariffSchedule& t, const TimeGrid& g) {
          return compute_bill(net, t, g);
        },
        py::arg("net_demand"), py::arg("tariff"), py::arg("grid"));

  py::class_<BatterySpec>(m, "BatterySpec")
      .def(py::init([](double bpr, double ber, double eta, double j_init) {
             BatterySpec b{bpr, ber, eta, j_init};
             validate(b);
             return b;
           }),
           py::arg("bpr"), py::arg("ber"), py::arg("eta") = 0.85, py::arg("j_init") = 0.0)
      .def_readonly("bpr", &BatterySpec::bpr)
      .def_readonly("ber", &BatterySpec::ber)
      .def_readonly("eta", &BatterySpec::eta)
      .def_readonly("j_init", &BatterySpec::j_init);

  py::class_<FlexSpec>(m, "FlexSpec")
      .def(py::init([](double flex_pct, double recovery_hours) {
             FlexSpec f{flex_pct, recovery_hours};
             validate(f);
             return f;
           }),
           py::arg("flex_pct"), py::arg("recovery_hours"))
      .def_readonly("flex_pct", &FlexSpec::flex_pct)
      .def_readonly("recovery_hours", &FlexSpec::recovery_hours)
      .def_property_readonly("delta_steps", &FlexSpec::delta_steps);

  m.def("battery_from_sweep",
        [](double ratio, double duration, double annual_max, double eta, double j_init_fraction) {
          return battery_from_sweep(ratio, duration, annual_max, BatteryDefaults{eta, j_init_fraction});
        },
        py::arg("power_ratio"), py::arg("duration_hours"), py::arg("annual_max"), py::arg("eta") = 0.85,
        py::arg("j_init_fraction") = 0.5);
  m.def("option_s_eligible", &option_s_eligible, py::arg("battery"), py::arg("annual_max"));
  m.def("flex_bounds",
        [](const FlexSpec& f, const std::vector<double>& d_base) {
          auto b = flex_bounds(f, std::span<const double>(d_base));
          return py::make_tuple(b.lower, b.upper);
        },
        py::arg("flex"), py::arg("d_base"));
  m.def("synth_pv", [](double nameplate, const TimeGrid& g) { return synth_pv(nameplate, g).p_pv; },
        py::arg("nameplate"), py::arg("grid"));
  m.def("load_series",
        [](const std::filesystem::path& path, const TimeGrid& g) {
          return SeriesTable::read_csv(path).slice(g);
        },
        py::arg("path"), py::arg("grid"), "Reads a timestamp,kW CSV and slices it onto the grid.");

  py::class_<Tightness>(m, "Tightness")
      .def_readonly("max_active_steps", &Tightness::max_active_steps)
      .def_readonly("tou_active_count", &Tightness::tou_active_count);

  py::class_<DispatchSolution>(m, "DispatchSolution")
      .def_property_readonly("status", [](const DispatchSolution& s) { return to_string(s.status); })
      .def_readonly("detail", &DispatchSolution::detail)
      .def_readonly("objective_value", &DispatchSolution::objective_value)
      .def_readonly("d_net", &DispatchSolution::d_net)
      .def_readonly("d_net_pos", &DispatchSolution::d_net_pos)
      .def_readonly("d_dev", &DispatchSolution::d_dev)
      .def_readonly("p_cha", &DispatchSolution::p_cha)
      .def_readonly("p_dis", &DispatchSolution::p_dis)
      .def_readonly("soc", &DispatchSolution::soc)
      .def_readonly("d_max", &DispatchSolution::d_max)
      .def_readonly("d_tou", &DispatchSolution::d_tou)
      .def_readonly("tightness", &DispatchSolution::tightness)
      .def_readonly("iterations", &DispatchSolution::iterations)
      .def_property_readonly("optimal", &DispatchSolution::optimal);

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_property_readonly("max_residual", &residuals)
      .def_readonly("objective", &VerificationReport::objective)
      .def_readonly("oracle_bill", &VerificationReport::oracle_bill)
      .def_readonly("oracle_gap", &VerificationReport::oracle_gap)
      .def_readonly("oracle_applicable", &VerificationReport::oracle_applicable)
      .def_readonly("simultaneous_steps", &VerificationReport::simultaneous_steps)
      .def_readonly("failures", &VerificationReport::failures)
      .def_property_readonly("passed", &VerificationReport::passed);

  m.def(
      "lp_summary",
      [](const TimeGrid& g, std::vector<double> d_base, std::vector<double> p_pv, const TariffSchedule& t,
         std::optional<BatterySpec> battery, std::optional<FlexSpec> flex) {
        const auto lp = build_lp(month_inputs(g, std::move(d_base), std::move(p_pv), battery, flex), t);
        py::dict d;
        d["columns"] = lp.col_count();
        d["rows"] = lp.row_count();
        d["nonzeros"] = lp.nonzeros();
        d["rows_by_tag"] = row_counts(lp);
        return d;
      },
      py::arg("grid"), py::arg("d_base"), py::arg("p_pv"), py::arg("tariff"), py::arg("battery") = py::none(),
      py::arg("flex") = py::none());

  m.def(
      "write_lp",
      [](const TimeGrid& g, std::vector<double> d_base, std::vector<double> p_pv, const TariffSchedule& t,
         std::optional<BatterySpec> battery, std::optional<FlexSpec> flex) {
        std::ostringstream os;
        write_lp_format(build_lp(month_inputs(g, std::move(d_base), std::move(p_pv), battery, flex), t), os);
        return os.str();
      },
      py::arg("grid"), py::arg("d_base"), py::arg("p_pv"), py::arg("tariff"), py::arg("battery") = py::none(),
      py::arg("flex") = py::none());

  m.def(
      "solve_month",
      [](const TimeGrid& g, std::vector<double> d_base, std::vector<double> p_pv, const TariffSchedule& t,
         std::optional<BatterySpec> battery, std::optional<FlexSpec> flex, double tol) {
        const auto in = month_inputs(g, std::move(d_base), std::move(p_pv), battery, flex);
        const auto lp = build_lp(in, t);
        DispatchSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve_lp(lp, SolveOptions{tol, false});
        }
        auto report = sol.optimal() ? verify_solution(sol, in, t) : VerificationReport{};
        return py::make_tuple(sol, report);
      },
      py::arg("grid"), py::arg("d_base"), py::arg("p_pv"), py::arg("tariff"), py::arg("battery") = py::none(),
      py::arg("flex") = py::none(), py::arg("tol") = 1e-7,
      "Builds, solves and verifies one monthly LP. Returns (solution, report).");

  py::class_<MetricSet>(m, "MetricSet")
      .def(py::init<double, double, double>(), py::arg("mean_peak_ramp"), py::arg("mean_peak_net_demand"),
           py::arg("total_bill"))
      .def_readonly("mean_peak_ramp", &MetricSet::mean_peak_ramp)
      .def_readonly("mean_peak_net_demand", &MetricSet::mean_peak_net_demand)
      .def_readonly("total_bill", &MetricSet::total_bill);

  m.def(
      "peak_ramp_mean",
      [](const std::vector<double>& d, const Mask& mask, const std::vector<std::size_t>& starts) {
        return peak_ramp_mean(d, mask, starts);
      },
      py::arg("d_net"), py::arg("mask"), py::arg("segment_starts") = std::vector<std::size_t>{});
  m.def(
      "peak_net_mean", [](const std::vector<double>& d, const Mask& mask) { return peak_net_mean(d, mask); },
      py::arg("d_net"), py::arg("mask"));
  m.def(
      "relative_metrics",
      [](const MetricSet& storage, const MetricSet& base) {
        const auto r = relative_metrics(storage, base);
        py::dict d;
        d["bill"] = r.bill;
        d["ramp"] = r.ramp;
        d["net"] = r.net;
        return d;
      },
      py::arg("storage"), py::arg("base"));

  m.def(
      "run_sweep",
      [](const std::filesystem::path& config, std::optional<std::filesystem::path> out,
         std::optional<unsigned> jobs) {
        auto c = load_sweep_config(config);
        if (out) c.output_dir = *out;
        if (jobs) c.jobs = *jobs;
        validate(c);
        SweepOutcome o;
        {
          py::gil_scoped_release release;
          o = run_sweep(c);
        }
        py::dict d;
        d["output_dir"] = c.output_dir;
        d["flex_rows"] = o.flex_rows.size();
        d["bes_rows"] = o.bes_rows.size();
        d["failed_points"] = o.failed_points;
        return d;
      },
      py::arg("config"), py::arg("output_dir") = py::none(), py::arg("jobs") = py::none(),
      "Runs a sweep from a JSON config and writes the CSV outputs.");
}
