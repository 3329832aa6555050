"""Exit criteria for the push/pull fatigue simulator, one test per criterion."""

import math
import time

import numpy as np
import pytest

from armfatigue.anthropometry import BodySegmentSet
from armfatigue.dynamics import ExternalLoad, inverse_dynamics, lagrangian_oracle
from armfatigue.fatigue import (
    FatigueParams,
    GroupFatigueState,
    PhaseSchedule,
    fatigue_step,
    integrate_group,
    met_static,
    phase_at,
    static_fcem,
)
from armfatigue.kinematics import Branch, JointState, forward_kinematics, inverse_kinematics
from armfatigue.scenario import export, run
from armfatigue.strength import StrengthModel, strength_elbow, strength_shoulder


@pytest.mark.criterion("1 Newton-Euler vs Lagrangian oracle <= 1e-9 rel over 1000 draws, < 1 s")
def test_oracle_equivalence(criterion):
    rng = np.random.default_rng(2024)
    cases = []
    for _ in range(1000):
        L1, L2 = rng.uniform(0.15, 0.6, 2)
        seg = BodySegmentSet(
            L1=L1, L2=L2, m1=rng.uniform(0.3, 6), m2=rng.uniform(0.3, 6),
            r1=rng.uniform(0.05, 0.95) * L1, r2=rng.uniform(0.05, 0.95) * L2,
            I1=rng.uniform(1e-3, 0.2), I2=rng.uniform(1e-3, 0.2),
        )
        state = JointState(*rng.uniform(-math.pi, math.pi, 2), *rng.uniform(-6, 6, 2), *rng.uniform(-30, 30, 2))
        load = ExternalLoad(rng.uniform(-60, 60), rng.uniform(0, 5), rng.uniform(0, 12))
        cases.append((state, seg, load))
    start = time.perf_counter()
    worst = 0.0
    for case in cases:
        a, b = inverse_dynamics(*case), lagrangian_oracle(*case)
        va, vb = np.array([a.tau_shoulder, a.tau_elbow]), np.array([b.tau_shoulder, b.tau_elbow])
        worst = max(worst, np.abs(va - vb).max() / np.abs(vb).max())
    elapsed = time.perf_counter() - start
    criterion.note(f"max rel err {worst:.2e}, {elapsed:.3f} s")
    assert worst <= 1e-9
    assert elapsed < 1.0


@pytest.mark.criterion("2 FK(IK(p)) = p within 1e-10 m on a 100x100 workspace grid, both branches")
def test_kinematics_roundtrip(criterion, segments):
    inner, outer = abs(segments.L1 - segments.L2), segments.L1 + segments.L2
    radii = inner + (outer - inner) * (np.arange(100) + 0.5) / 100
    angles = -math.pi + 2 * math.pi * np.arange(100) / 100
    worst = 0.0
    for branch in Branch:
        for r in radii:
            for phi in angles:
                p = (r * math.cos(phi), r * math.sin(phi))
                x, y = forward_kinematics(JointState(*inverse_kinematics(p, segments, branch)), segments)
                worst = max(worst, math.hypot(x - p[0], y - p[1]))
    criterion.note(f"max error {worst:.2e} m")
    assert worst <= 1e-10


@pytest.mark.criterion("3 stepped fatigue vs closed form: <= 1e-6 rel at 1 ms over 5 min; halving dt cuts error >= 1.9x")
def test_static_fatigue_closed_form(criterion):
    mvc, load, k, minutes = 100.0, 50.0, 1.0, 5.0
    exact = static_fcem(mvc, load, k, minutes)
    params = FatigueParams(k_push=k)
    errors = {}
    for dt in (1e-3, 5e-4):
        s = GroupFatigueState.fresh(mvc)
        for _ in range(round(minutes * 60 / dt)):
            s = fatigue_step(s, load, mvc, params, dt, True)
        errors[dt] = abs(s.F_cem - exact) / exact
    ratio = errors[1e-3] / errors[5e-4] if errors[5e-4] > 0 else math.inf
    criterion.note(f"err(1 ms) {errors[1e-3]:.2e}, err(0.5 ms) {errors[5e-4]:.2e}, ratio {ratio:.2f}")
    assert errors[1e-3] <= 1e-6
    assert ratio >= 1.9


@pytest.mark.criterion("4 MET(100, 50, 1) = 1.3863 min +- 1e-4; static_fcem(MET) = load within 1e-9 over 1000 draws")
def test_met_consistency(criterion):
    met = met_static(100.0, 50.0, 1.0).minutes
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        mvc = rng.uniform(1, 500)
        load = mvc * rng.uniform(1e-3, 1.0)
        k = rng.uniform(0.05, 5)
        t = met_static(mvc, load, k).minutes
        worst = max(worst, abs(static_fcem(mvc, load, k, t) - load) / load)
    criterion.note(f"MET {met:.6f} min, worst roundtrip {worst:.1e}")
    assert abs(met - 1.3863) <= 1e-4
    assert worst <= 1e-9


@pytest.mark.criterion("5 strength_elbow(90, 90, 1) = 406.40, strength_shoulder(90, 90, 1) = 247.948")
def test_strength_fidelity(criterion):
    model = StrengthModel(G_elbow=1.0, G_shoulder=1.0)
    elbow, shoulder = strength_elbow(90, 90, model), strength_shoulder(90, 90, model)
    criterion.note(f"{elbow:.2f} / {shoulder:.3f}")
    assert f"{elbow:.2f}" == "406.40"
    assert f"{shoulder:.3f}" == "247.948"


@pytest.mark.criterion("6 case-study IK endpoints within 3 deg of (-49.3, -42.3) and (124.1, 101.3)")
def test_case_study_geometry(criterion, case_study):
    seg, y = case_study.segments, case_study.path.y_hand
    worst = 0.0
    for x, t1_ref, t4_ref in ((0.3, -49.3, 124.1), (0.4, -42.3, 101.3)):
        t1, t4 = inverse_kinematics((x, y), seg, case_study.branch)
        worst = max(worst, abs(math.degrees(t1) - t1_ref), abs(math.degrees(t4) - t4_ref))
    criterion.note(f"max deviation {worst:.3f} deg")
    assert worst <= 3.0


@pytest.mark.criterion("7 shoulder crossing in [3.5, 6.5] min, elbow in [8, 14] min, shoulder first; 15 min run < 5 s")
def test_case_study_crossings(criterion, case_study):
    assert case_study.dt == 1e-3 and case_study.horizon == 900.0
    start = time.perf_counter()
    result = run(case_study)
    elapsed = time.perf_counter() - start
    shoulder, elbow = result.crossings["shoulder"], result.crossings["elbow"]
    criterion.note(f"shoulder {shoulder.minutes:.3f} min, elbow {elbow.minutes:.3f} min, run {elapsed:.2f} s")
    assert 3.5 <= shoulder.minutes <= 6.5
    assert 8.0 <= elbow.minutes <= 14.0
    assert shoulder.time < elbow.time
    assert elapsed < 5.0


@pytest.mark.criterion("8 two runs of the shipped scenario give byte-identical CSV and JSON")
def test_determinism(criterion, case_study, tmp_path):
    results = []
    for name in ("first", "second"):
        paths = export(run(case_study), tmp_path / name)
        results.append({p.name: p.read_bytes() for p in paths})
    criterion.note(f"{len(results[0])} files compared")
    assert results[0] == results[1]


@pytest.mark.criterion("9 R in (0, 1], non-increasing, inactive groups bit-stable (randomized schedules)")
def test_fatigue_state_properties(criterion, case_result):
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(200):
        schedule = PhaseSchedule(*rng.uniform(0.2, 30, 2))
        dt = rng.uniform(1e-3, 0.1)
        t = np.arange(2000) * dt
        phases = phase_at(t, schedule)
        demand = rng.uniform(0, 300, len(t)) * (rng.random(len(t)) < 0.8)
        mvc = rng.uniform(5, 200, len(t))
        for code in (0, 1):
            active = phases == code
            R = integrate_group(demand, mvc, active, rng.uniform(0, 30), dt)
            assert np.all(R > 0) and np.all(R <= 1)
            assert np.all(np.diff(R) <= 0)
            assert np.array_equal(R[1:][~active[:-1]], R[:-1][~active[:-1]])
            checked += 1
    for js in case_result.joints.values():
        for code, g in ((0, js.push), (1, js.pull)):
            inactive = case_result.phase[:-1] != code
            assert np.all(g.R > 0) and np.all(g.R <= 1) and np.all(np.diff(g.R) <= 0)
            assert np.array_equal(g.R[1:][inactive], g.R[:-1][inactive])
    criterion.note(f"{checked} randomized group series + case study")
