import copy
import json

import numpy as np
import pytest

from armfatigue.calibration import angle_residuals, calibrate_y_hand, crossing_sweep
from armfatigue.fatigue import GuardViolation
from armfatigue.scenario import (
    TIMESERIES_COLUMNS,
    Scenario,
    ScenarioError,
    export,
    read_timeseries_csv,
    run,
    validate,
)


@pytest.fixture
def small(case_study):
    """A two-cycle variant of the case study at a coarse step."""
    data = case_study.to_dict()
    data["simulation"] = {"dt_s": 0.05, "horizon_s": 240.0}
    data["output"] = {"csv_stride": 1}
    return data


def test_shipped_ordering(case_result):
    c = case_result.crossings
    assert c["shoulder"] is not None and c["elbow"] is not None
    assert c["shoulder"].time < c["elbow"].time


def test_no_load_limit(small):
    data = copy.deepcopy(small)
    data["load"] = {"push_force_N": 0.0, "pull_force_N": 0.0, "object_mass_kg": 0.0, "gravity_mps2": 9.81}
    res = run(Scenario.from_dict(data))
    assert res.joints["shoulder"].push.R[-1] < 1.0  # gravity alone still loads the arm

    data["load"]["gravity_mps2"] = 0.0
    res = run(Scenario.from_dict(data))
    for js in res.joints.values():
        # arm inertia leaves a tiny demand; without it R would be exactly 1
        assert js.demand.max() < 1e-3
        assert np.all(js.push.R > 1 - 1e-5) and np.all(js.pull.R > 1 - 1e-5)
        assert js.crossing is None


def test_frozen_fatigue(small):
    data = copy.deepcopy(small)
    data["fatigue"] = {"k_push_per_min": 0.0, "k_pull_per_min": 0.0, "recovery_per_min": 0.0}
    res = run(Scenario.from_dict(data))
    for js in res.joints.values():
        assert np.array_equal(js.capacity, js.mvc)
        assert js.crossing is None or js.capacity[js.crossing.index] <= js.demand[js.crossing.index]


def test_capacity_jumps_only_at_phase_boundaries(case_result):
    t = case_result.t
    boundary = np.diff(case_result.phase) != 0
    for js in case_result.joints.values():
        jumps = np.abs(np.diff(js.capacity)) > 1e-3
        assert np.all(boundary[jumps])
    assert boundary.sum() == int(case_result.scenario.horizon // 60)
    assert t[1:][boundary][0] == pytest.approx(60.0)


def test_validate_shipped_is_clean(case_study):
    assert validate(case_study.to_dict()) == []


def test_validate_rejects_zero_dt(small):
    data = copy.deepcopy(small)
    data["simulation"]["dt_s"] = 0
    problems = validate(data)
    assert any(p.startswith("simulation.dt_s") for p in problems)


def test_validate_reports_unreachable_endpoint(small):
    data = copy.deepcopy(small)
    data["hand_path"]["x_end_m"] = 0.9
    problems = validate(data)
    assert any("x_end" in p and "annulus" in p for p in problems)


def test_validate_lists_every_problem(small):
    data = copy.deepcopy(small)
    data["simulation"]["dt_s"] = -1
    data["subject"]["height_m"] = 0
    data["load"]["bogus"] = 1
    data["schema_version"] = 7
    problems = validate(data)
    assert len(problems) >= 4
    with pytest.raises(ScenarioError) as err:
        Scenario.from_dict(data)
    assert err.value.problems == problems


def test_validate_horizon_and_step_limits(small):
    data = copy.deepcopy(small)
    data["simulation"] = {"dt_s": 5.0, "horizon_s": 100.0}
    problems = validate(data)
    assert any("shorter than one push/pull cycle" in p for p in problems)
    assert any("stroke_period/100" in p for p in problems)


def test_guard_violation_names_time(small):
    data = copy.deepcopy(small)
    data["strength"]["coefficients"] = {"d0": -500.0}
    with pytest.raises(GuardViolation, match=r"shoulder MVC .* at t = 0.0 s"):
        run(Scenario.from_dict(data))


def test_export_roundtrip(tmp_path, small):
    res = run(Scenario.from_dict(small))
    export(res, tmp_path)
    table = read_timeseries_csv(tmp_path / "timeseries.csv")
    assert tuple(table) == TIMESERIES_COLUMNS
    assert np.array_equal(table["t_s"], res.t)
    assert np.array_equal(table["tau_elbow_Nm"], res.torques.tau_elbow)
    assert np.array_equal(table["R_shoulder_pull"], res.joints["shoulder"].pull.R)
    assert np.array_equal(table["capacity_elbow_Nm"], res.joints["elbow"].capacity)
    assert np.array_equal(table["theta4_deg"], np.degrees(res.trajectory.theta4))
    assert set(table["phase"]) == {"push", "pull"}

    summary = json.loads((tmp_path / "summary.json").read_text())
    for joint, c in res.crossings.items():
        if c is None:
            assert summary["crossings"][joint] is None
        else:
            assert summary["crossings"][joint]["time_s"] == c.time
    assert summary["provenance"]["scenario_hash"] == res.scenario.digest()

    fatigue_rows = (tmp_path / "fatigue.csv").read_text().splitlines()
    assert fatigue_rows[0] == "t,joint,group,MVC_Nm,R,F_cem_Nm,demand_Nm,phase"
    assert len(fatigue_rows) == 1 + 4 * len(res.t)


def test_export_is_deterministic(tmp_path, small):
    for name in ("a", "b"):
        export(run(Scenario.from_dict(small)), tmp_path / name)
    for f in ("timeseries.csv", "fatigue.csv", "trajectory.csv", "torques.csv", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_hash_tracks_configuration(case_study):
    assert case_study.digest() == case_study.with_dt(case_study.dt).digest()
    assert case_study.digest() != case_study.with_dt(0.0005).digest()


def test_refinement_stability(case_study, case_result):
    fine = run(case_study.with_dt(case_study.dt / 2))
    for joint in ("shoulder", "elbow"):
        a = case_result.crossings[joint].time
        b = fine.crossings[joint].time
        assert abs(a - b) / a < 0.005


def test_sampled_module_invariants(case_result):
    tr = case_result.trajectory
    assert np.all((tr.theta4 > 0) & (tr.theta4 < np.pi))
    for js in case_result.joints.values():
        assert np.all(js.mvc > 0)
        for g in (js.push, js.pull):
            assert np.all((g.R > 0) & (g.R <= 1)) and np.all(np.diff(g.R) <= 0)


def test_calibration_reproduces_frozen_hand_height(case_study):
    y = calibrate_y_hand(case_study.segments)
    assert y == pytest.approx(case_study.path.y_hand, abs=1e-6)
    assert np.abs(angle_residuals(y, case_study.segments)).max() < 0.05


def test_calibrated_scales_sit_inside_the_bands(case_study):
    coarse = case_study.with_dt(0.01)
    for joint, scale, band in (("shoulder", 0.88, (3.5, 6.5)), ("elbow", 0.545, (8.0, 14.0))):
        sweep = crossing_sweep(coarse, joint, [scale * 0.97, scale, scale * 1.03])
        assert all(m is not None and band[0] <= m <= band[1] for _, m in sweep)
