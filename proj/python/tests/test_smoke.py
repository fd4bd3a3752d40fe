import json
import math

import pytest

import flexbill as fb


def test_grid_and_tariff(bundled):
    grid = fb.TimeGrid(2021, 2)
    assert len(grid) == 28 * 96
    assert grid.iso(0) == "2021-02-01T00:00"
    base = fb.load_tariff(bundled / "base_b19.json")
    assert base.id == "base_b19"
    assert len(base.periods) == len(base.er)
    mask = base.peak_mask(grid)
    assert 0 < sum(mask) < len(grid)


def test_tariff_json_round_trip(bundled):
    base = fb.load_tariff(bundled / "storage_option_s.json")
    again = fb.parse_tariff_json(base.to_json())
    assert again.er == base.er
    assert again.dr_tou == base.dr_tou


def test_bad_tariff_raises(bundled):
    doc = json.loads((bundled / "base_b19.json").read_text())
    doc["non_bypassable_charge"] = -1.0
    with pytest.raises(fb.ValidationError):
        fb.parse_tariff_json(json.dumps(doc))
    with pytest.raises(ValueError):
        fb.FlexSpec(1.5, 2.0)


def test_no_asset_month_matches_bill(bundled):
    grid = fb.TimeGrid(2021, 7, 1, 96 * 3)
    tariff = fb.load_tariff(bundled / "base_b19.json")
    load = fb.load_series(bundled / "load_synthetic_2021.csv", grid)
    pv = fb.synth_pv(231.8, grid)
    sol, report = fb.solve_month(grid, load, pv, tariff)
    assert sol.optimal
    assert report.passed, report.failures
    net = [d - p for d, p in zip(load, pv)]
    assert sol.d_net == pytest.approx(net, abs=1e-9)
    bill = fb.compute_bill(net, tariff, grid)
    assert sol.objective_value == pytest.approx(bill.total, rel=1e-6)


def test_assets_do_not_raise_the_bill(bundled):
    grid = fb.TimeGrid(2021, 7, 5, 96 * 2)
    tariff = fb.load_tariff(bundled / "storage_option_s.json")
    load = fb.load_series(bundled / "load_synthetic_2021.csv", grid)
    pv = fb.synth_pv(231.8, grid)
    plain, _ = fb.solve_month(grid, load, pv, tariff)
    battery = fb.battery_from_sweep(0.3, 2.0, 220.9)
    assert battery.bpr == pytest.approx(66.27)
    assert fb.option_s_eligible(battery, 220.9)
    flex = fb.FlexSpec(0.5, 4.0)
    sol, report = fb.solve_month(grid, load, pv, tariff, battery=battery, flex=flex)
    assert report.passed, report.failures
    assert sol.objective_value <= plain.objective_value + 1e-6
    assert abs(sum(sol.d_dev)) < 1e-4
    assert all(0.0 <= j <= battery.ber + 1e-6 for j in sol.soc)


def test_lp_shape():
    grid = fb.TimeGrid(2021, 1, 4, 8)
    tariff = fb.parse_tariff_json(json.dumps({
        "id": "toy",
        "demand_rate_max": 10.0,
        "demand_rates": {"all": 2.0},
        "energy_rates": {"all": 0.1},
        "non_bypassable_charge": 0.02,
        "tou_rules": [{"period": "all", "months": [], "day_class": "all", "hour_ranges": [[0, 24]]}],
    }))
    summary = fb.lp_summary(grid, [5.0] * 8, [0.0] * 8, tariff,
                            battery=fb.BatterySpec(1.0, 2.0, 0.85, 1.0), flex=fb.FlexSpec(1.0, 0.5))
    assert summary["columns"] == 6 * 8 + 1 + 1
    assert summary["rows_by_tag"]["eq15"] == 8
    assert "eq16_0:" in fb.write_lp(grid, [5.0] * 8, [0.0] * 8, tariff)


def test_metrics():
    assert fb.peak_ramp_mean([0, 4, 8, 4], [1, 1, 1, 1]) == 4.0
    assert fb.peak_net_mean([5, 10, 15], [1, 1, 1]) == 10.0
    r = fb.relative_metrics(fb.MetricSet(2, 30, 900), fb.MetricSet(4, 60, 1000))
    assert r["bill"] == pytest.approx(0.9)
    assert fb.relative_metrics(fb.MetricSet(1, 1, 1), fb.MetricSet(0, 1, 0))["ramp"] is None


def test_small_sweep(bundled, tmp_path):
    cfg = json.loads((bundled / "example.json").read_text())
    for key in ("load_csv", "base_tariff", "storage_tariff"):
        cfg[key] = str(bundled / cfg[key])
    cfg["flex"] = {"recovery_hours": [2], "flex_pct": [0.2]}
    cfg["battery"] = {"power_ratio": [], "duration_hours": [1]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = fb.run_sweep(path, output_dir=tmp_path / "out", jobs=1)
    assert out["failed_points"] == 0
    assert out["flex_rows"] == 3
    lines = (tmp_path / "out" / "flex_sweep.csv").read_text().splitlines()
    assert lines[0].startswith("family,recovery_hours")
    ratio = lines[3].split(",")
    assert ratio[5] == "ratio"
    assert math.isfinite(float(ratio[9]))
