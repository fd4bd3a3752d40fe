"""Bill-minimising dispatch of flexible demand and batteries under demand-charge tariffs."""

from ._core import (
    BatterySpec,
    BillBreakdown,
    DispatchSolution,
    FlexSpec,
    MetricSet,
    TariffSchedule,
    TimeGrid,
    ValidationError,
    VerificationReport,
    __version__,
    battery_from_sweep,
    compute_bill,
    flex_bounds,
    load_series,
    load_tariff,
    lp_summary,
    option_s_eligible,
    parse_tariff_json,
    peak_net_mean,
    peak_ramp_mean,
    relative_metrics,
    run_sweep,
    solve_month,
    synth_pv,
    write_lp,
)

__all__ = [
    "BatterySpec",
    "BillBreakdown",
    "DispatchSolution",
    "FlexSpec",
    "MetricSet",
    "TariffSchedule",
    "TimeGrid",
    "ValidationError",
    "VerificationReport",
    "__version__",
    "battery_from_sweep",
    "compute_bill",
    "flex_bounds",
    "load_series",
    "load_tariff",
    "lp_summary",
    "option_s_eligible",
    "parse_tariff_json",
    "peak_net_mean",
    "peak_ramp_mean",
    "relative_metrics",
    "run_sweep",
    "solve_month",
    "synth_pv",
    "write_lp",
]
