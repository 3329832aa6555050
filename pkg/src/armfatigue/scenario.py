"""Scenario configuration, the simulation loop, and result export."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import __version__
from .anthropometry import BodySegmentSet, Gender, ProportionTable, Subject, derive_segments
from .dynamics import STANDARD_GRAVITY, ExternalLoad, LoadSchedule, TorqueSeries, torque_series
from .fatigue import (
    Crossing,
    FatigueParams,
    GuardViolation,
    Phase,
    PhaseSchedule,
    detect_crossing,
    integrate_group,
    phase_at,
    piecewise_capacity,
)
from .kinematics import Branch, HandPath, JointTrajectory, generate_trajectory
from .strength import AngleMapping, StrengthModel, mvc_series

SCHEMA_VERSION = 1
JOINTS = ("shoulder", "elbow")
GROUPS = ("push", "pull")

TIMESERIES_COLUMNS = (
    "t_s",
    "theta1_deg",
    "theta4_deg",
    "tau_shoulder_Nm",
    "tau_elbow_Nm",
    "mvc_shoulder_Nm",
    "mvc_elbow_Nm",
    "R_shoulder_push",
    "R_shoulder_pull",
    "R_elbow_push",
    "R_elbow_pull",
    "capacity_shoulder_Nm",
    "capacity_elbow_Nm",
    "phase",
)
FATIGUE_COLUMNS = ("t", "joint", "group", "MVC_Nm", "R", "F_cem_Nm", "demand_Nm", "phase")


class ScenarioError(ValueError):
    """A scenario failed validation; ``problems`` lists every violation."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.problems))


@dataclass(frozen=True)
class StrengthSettings:
    mapping: AngleMapping = AngleMapping.PUBLISHED
    G_elbow: Optional[float] = None  # None: gender default
    G_shoulder: Optional[float] = None
    g_scale_elbow: float = 1.0
    g_scale_shoulder: float = 1.0
    elbow_quadratic_in_ae: bool = False
    # overrides for the regression constants c0..c2 (elbow), d0..d2 (shoulder)
    coefficients: Optional[dict] = None

    def model(self, gender: Gender) -> StrengthModel:
        base = StrengthModel.for_gender(gender)
        g_e = base.G_elbow if self.G_elbow is None else self.G_elbow
        g_s = base.G_shoulder if self.G_shoulder is None else self.G_shoulder
        return StrengthModel(
            G_elbow=g_e * self.g_scale_elbow,
            G_shoulder=g_s * self.g_scale_shoulder,
            elbow_quadratic_in_ae=self.elbow_quadratic_in_ae,
            **(self.coefficients or {}),
        )


@dataclass(frozen=True)
class TaskLoad:
    push_force_N: float = 10.0
    pull_force_N: float = 10.0
    object_mass_kg: float = 0.0
    gravity_mps2: float = STANDARD_GRAVITY

    def schedule(self, phases: PhaseSchedule) -> LoadSchedule:
        # both forces are magnitudes; pulling acts along -x
        return LoadSchedule(
            push=ExternalLoad(self.push_force_N, self.object_mass_kg, self.gravity_mps2),
            pull=ExternalLoad(-self.pull_force_N, self.object_mass_kg, self.gravity_mps2),
            schedule=phases,
        )


@dataclass(frozen=True)
class Scenario:
    name: str
    subject: Subject
    proportions: ProportionTable
    path: HandPath
    branch: Branch
    schedule: PhaseSchedule
    load: TaskLoad
    strength: StrengthSettings
    fatigue: FatigueParams
    dt: float
    horizon: float
    csv_stride: int = 100

    @property
    def segments(self) -> BodySegmentSet:
        return derive_segments(self.subject, self.proportions)

    def to_dict(self) -> dict[str, Any]:
        """Canonical configuration mapping (same layout as the YAML file)."""
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "subject": {
                "height_m": self.subject.height,
                "body_mass_kg": self.subject.body_mass,
                "gender": self.subject.gender.value,
            },
            "proportions": asdict(self.proportions),
            "hand_path": {
                "x_start_m": self.path.x_start,
                "x_end_m": self.path.x_end,
                "y_hand_m": self.path.y_hand,
                "profile": self.path.profile.value,
                "stroke_period_s": self.path.stroke_period,
                "branch": self.branch.value,
            },
            "schedule": {"T_push_s": self.schedule.T_push, "T_pull_s": self.schedule.T_pull},
            "load": asdict(self.load),
            "strength": {
                "mapping": self.strength.mapping.value,
                "G_elbow": self.strength.G_elbow,
                "G_shoulder": self.strength.G_shoulder,
                "g_scale_elbow": self.strength.g_scale_elbow,
                "g_scale_shoulder": self.strength.g_scale_shoulder,
                "elbow_quadratic_in_ae": self.strength.elbow_quadratic_in_ae,
                "coefficients": self.strength.coefficients,
            },
            "fatigue": {
                "k_push_per_min": self.fatigue.k_push,
                "k_pull_per_min": self.fatigue.k_pull,
                "recovery_per_min": self.fatigue.recovery,
            },
            "simulation": {"dt_s": self.dt, "horizon_s": self.horizon},
            "output": {"csv_stride": self.csv_stride},
        }

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def with_dt(self, dt: float) -> "Scenario":
        data = self.to_dict()
        data["simulation"]["dt_s"] = dt
        return Scenario.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        scenario, problems = _parse(data)
        if problems:
            raise ScenarioError(problems)
        return scenario


# --------------------------------------------------------------------------
# parsing and validation


def _section(data, key, problems, required=True) -> dict:
    value = data.get(key)
    if value is None:
        if required:
            problems.append(f"{key}: missing section")
        return {}
    if not isinstance(value, dict):
        problems.append(f"{key}: expected a mapping")
        return {}
    return value


def _build(label, problems, factory, *args, **kw):
    try:
        return factory(*args, **kw)
    except (TypeError, ValueError, KeyError) as exc:
        problems.append(f"{label}: {exc}")
        return None


def _take(section, label, problems, mapping):
    """Rename configuration keys to constructor keywords, flagging unknown keys."""
    unknown = sorted(set(section) - set(mapping))
    for key in unknown:
        problems.append(f"{label}.{key}: unknown field")
    return {mapping[k]: v for k, v in section.items() if k in mapping}


def _parse(data) -> tuple[Optional[Scenario], list[str]]:
    problems: list[str] = []
    if not isinstance(data, dict):
        return None, ["scenario: expected a mapping at the top level"]
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        problems.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    known = {"schema_version", "name", "subject", "proportions", "hand_path", "schedule", "load",
             "strength", "fatigue", "simulation", "output"}
    for key in sorted(set(data) - known):
        problems.append(f"{key}: unknown section")

    subj = _take(_section(data, "subject", problems), "subject", problems,
                 {"height_m": "height", "body_mass_kg": "body_mass", "gender": "gender"})
    subject = _build("subject", problems, Subject, **subj)

    prop_fields = {f.name: f.name for f in fields(ProportionTable)}
    props = _take(_section(data, "proportions", problems, required=False), "proportions", problems, prop_fields)
    proportions = _build("proportions", problems, ProportionTable, **props)

    hp = _take(_section(data, "hand_path", problems), "hand_path", problems,
               {"x_start_m": "x_start", "x_end_m": "x_end", "y_hand_m": "y_hand", "profile": "profile",
                "stroke_period_s": "stroke_period", "branch": "branch"})
    branch = _build("hand_path.branch", problems, Branch, hp.pop("branch", Branch.ELBOW_DOWN.value))
    path = _build("hand_path", problems, HandPath, **hp)

    sch = _take(_section(data, "schedule", problems), "schedule", problems,
                {"T_push_s": "T_push", "T_pull_s": "T_pull"})
    schedule = _build("schedule", problems, PhaseSchedule, **sch)

    ld = _take(_section(data, "load", problems), "load", problems, {f.name: f.name for f in fields(TaskLoad)})
    load = _build("load", problems, TaskLoad, **ld)
    if load is not None:
        for name in ("push_force_N", "pull_force_N", "object_mass_kg", "gravity_mps2"):
            value = getattr(load, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                problems.append(f"load.{name}: must be a finite number >= 0, got {value!r}")

    st = _take(_section(data, "strength", problems, required=False), "strength", problems,
               {f.name: f.name for f in fields(StrengthSettings)})
    if "mapping" in st:
        st["mapping"] = _build("strength.mapping", problems, AngleMapping, st["mapping"])
    strength = _build("strength", problems, StrengthSettings, **st)
    if strength is not None and strength.coefficients is not None:
        allowed = {"c0", "c1", "c2", "d0", "d1", "d2"}
        if not isinstance(strength.coefficients, dict) or set(strength.coefficients) - allowed:
            problems.append(f"strength.coefficients: expected a mapping with keys from {sorted(allowed)}")
            strength = None
        else:
            _build("strength.coefficients", problems, strength.model, Gender.MALE)
    if strength is not None:
        for name in ("g_scale_elbow", "g_scale_shoulder", "G_elbow", "G_shoulder"):
            value = getattr(strength, name)
            if value is not None and not (isinstance(value, (int, float)) and value > 0):
                problems.append(f"strength.{name}: must be > 0, got {value!r}")

    fat = _take(_section(data, "fatigue", problems, required=False), "fatigue", problems,
                {"k_push_per_min": "k_push", "k_pull_per_min": "k_pull", "recovery_per_min": "recovery"})
    fatigue = _build("fatigue", problems, FatigueParams, **fat)

    sim = _section(data, "simulation", problems)
    dt = sim.get("dt_s")
    horizon = sim.get("horizon_s")
    for key in sorted(set(sim) - {"dt_s", "horizon_s"}):
        problems.append(f"simulation.{key}: unknown field")
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        problems.append(f"simulation.dt_s: must be > 0, got {dt!r}")
        dt = None
    if not (isinstance(horizon, (int, float)) and math.isfinite(horizon) and horizon > 0):
        problems.append(f"simulation.horizon_s: must be > 0, got {horizon!r}")
        horizon = None

    out = _section(data, "output", problems, required=False)
    for key in sorted(set(out) - {"csv_stride"}):
        problems.append(f"output.{key}: unknown field")
    stride = out.get("csv_stride", 100)
    if not (isinstance(stride, int) and stride >= 1):
        problems.append(f"output.csv_stride: must be an integer >= 1, got {stride!r}")

    # cross-field invariants
    if schedule is not None and horizon is not None and horizon < schedule.cycle:
        problems.append(f"simulation.horizon_s: {horizon} s is shorter than one push/pull cycle ({schedule.cycle} s)")
    if path is not None and dt is not None and dt > path.stroke_period / 100:
        problems.append(f"simulation.dt_s: {dt} s exceeds stroke_period/100 = {path.stroke_period / 100} s")
    if path is not None and subject is not None and proportions is not None:
        segments = _build("segments", problems, derive_segments, subject, proportions)
        if segments is not None:
            problems.extend(f"hand_path: {p}" for p in path.reachability_problems(segments))

    if problems:
        return None, problems
    scenario = Scenario(
        name=str(data.get("name", "unnamed")),
        subject=subject,
        proportions=proportions,
        path=path,
        branch=branch,
        schedule=schedule,
        load=load,
        strength=strength,
        fatigue=fatigue,
        dt=float(dt),
        horizon=float(horizon),
        csv_stride=stride,
    )
    return scenario, []


def validate(data) -> list[str]:
    """Every violated invariant of a scenario mapping (empty when valid)."""
    if isinstance(data, Scenario):
        data = data.to_dict()
    return _parse(data)[1]


def builtin_scenarios() -> list[str]:
    root = resources.files("armfatigue") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_scenario(source) -> Scenario:
    """Load a scenario from a YAML path or the name of a bundled scenario."""
    path = Path(source)
    if not path.exists() and str(source) in builtin_scenarios():
        text = (resources.files("armfatigue") / "data" / f"{source}.yaml").read_text()
    else:
        text = path.read_text()
    data = yaml.safe_load(text)
    return Scenario.from_dict(data)


# --------------------------------------------------------------------------
# simulation


@dataclass
class GroupSeries:
    R: np.ndarray
    F_cem: np.ndarray


@dataclass
class JointSeries:
    demand: np.ndarray  # |tau|, N m
    mvc: np.ndarray
    push: GroupSeries
    pull: GroupSeries
    capacity: np.ndarray
    crossing: Optional[Crossing]

    def group(self, name: str) -> GroupSeries:
        return self.push if name == "push" else self.pull


@dataclass
class SimulationResult:
    scenario: Scenario
    trajectory: JointTrajectory
    torques: TorqueSeries
    phase: np.ndarray  # phase codes, 0 = push
    joints: dict[str, JointSeries]
    provenance: dict[str, Any]
    warnings: list[str] = field(default_factory=list)

    @property
    def t(self) -> np.ndarray:
        return self.trajectory.t

    @property
    def crossings(self) -> dict[str, Optional[Crossing]]:
        return {name: js.crossing for name, js in self.joints.items()}

    def summary(self) -> dict[str, Any]:
        crossings = {}
        margins = {}
        for name, js in self.joints.items():
            c = js.crossing
            crossings[name] = None if c is None else {
                "time_s": c.time,
                "time_min": c.minutes,
                "sample_index": c.index,
                "demand_Nm": c.demand,
                "capacity_Nm": c.capacity,
            }
            margin = js.capacity - js.demand
            i = int(np.argmin(margin))
            margins[name] = {"min_margin_Nm": float(margin[i]), "at_time_s": float(self.t[i])}
        return {
            "scenario": self.scenario.name,
            "crossings": crossings,
            "margins": margins,
            "warnings": list(self.warnings),
            "provenance": dict(self.provenance),
        }


def run(scenario: Scenario) -> SimulationResult:
    """Simulate the push/pull task and locate each joint's fatigue-risk crossing.

    Each stage is evaluated over the whole time base in the order
    kinematics, dynamics, strength, fatigue, crossing detection.
    """
    problems = validate(scenario)
    if problems:
        raise ScenarioError(problems)
    segments = scenario.segments
    trajectory = generate_trajectory(scenario.path, segments, scenario.dt, scenario.horizon, scenario.branch)
    t = trajectory.t
    torques = torque_series(trajectory, segments, scenario.load.schedule(scenario.schedule))

    model = scenario.strength.model(scenario.subject.gender)
    mvc_s, mvc_e, warnings = mvc_series(trajectory.theta1, trajectory.theta4, model, scenario.strength.mapping)
    for name, mvc in (("shoulder", mvc_s), ("elbow", mvc_e)):
        bad = mvc <= 0
        if np.any(bad):
            i = int(np.argmax(bad))
            raise GuardViolation(
                f"{name} MVC = {mvc[i]:.6g} N m <= 0 at t = {t[i]} s "
                f"(theta1 = {math.degrees(trajectory.theta1[i]):.4f} deg, "
                f"theta4 = {math.degrees(trajectory.theta4[i]):.4f} deg)"
            )

    phase = phase_at(t, scenario.schedule)
    joints = {}
    for name, tau, mvc in (("shoulder", torques.tau_shoulder, mvc_s), ("elbow", torques.tau_elbow, mvc_e)):
        demand = np.abs(tau)
        groups = {}
        for group in (Phase.PUSH, Phase.PULL):
            R = integrate_group(
                demand, mvc, phase == group.code, scenario.fatigue.k(group), scenario.dt, scenario.fatigue.recovery
            )
            groups[group.value] = GroupSeries(R, mvc * R)
        capacity = piecewise_capacity(phase, groups["push"].F_cem, groups["pull"].F_cem)
        joints[name] = JointSeries(
            demand=demand,
            mvc=mvc,
            push=groups["push"],
            pull=groups["pull"],
            capacity=capacity,
            crossing=detect_crossing(t, capacity, demand),
        )
    _check_invariants(joints)
    provenance = {
        "scenario_hash": scenario.digest(),
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "dt_s": scenario.dt,
        "horizon_s": scenario.horizon,
        "samples": int(len(t)),
    }
    return SimulationResult(scenario, trajectory, torques, phase, joints, provenance, warnings)


def _check_invariants(joints: dict[str, JointSeries]):
    for name, js in joints.items():
        for group in GROUPS:
            R = js.group(group).R
            if not (np.all(R > 0) and np.all(R <= 1)):
                raise GuardViolation(f"{name}/{group}: fatigue factor left (0, 1]")


# --------------------------------------------------------------------------
# export


def _fmt(value) -> str:
    return repr(float(value))


def write_timeseries_csv(result: SimulationResult, path, stride: Optional[int] = None):
    stride = result.scenario.csv_stride if stride is None else stride
    tr, tq, J = result.trajectory, result.torques, result.joints
    columns = [
        tr.t,
        np.degrees(tr.theta1),
        np.degrees(tr.theta4),
        tq.tau_shoulder,
        tq.tau_elbow,
        J["shoulder"].mvc,
        J["elbow"].mvc,
        J["shoulder"].push.R,
        J["shoulder"].pull.R,
        J["elbow"].push.R,
        J["elbow"].pull.R,
        J["shoulder"].capacity,
        J["elbow"].capacity,
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TIMESERIES_COLUMNS)
        for i in range(0, len(tr), stride):
            row = [_fmt(c[i]) for c in columns]
            row.append(Phase.from_code(result.phase[i]).value)
            writer.writerow(row)


def write_fatigue_csv(result: SimulationResult, path, stride: Optional[int] = None):
    stride = result.scenario.csv_stride if stride is None else stride
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FATIGUE_COLUMNS)
        for i in range(0, len(result.t), stride):
            phase = Phase.from_code(result.phase[i]).value
            for joint in JOINTS:
                js = result.joints[joint]
                for group in GROUPS:
                    g = js.group(group)
                    writer.writerow([
                        _fmt(result.t[i]), joint, group, _fmt(js.mvc[i]), _fmt(g.R[i]),
                        _fmt(g.F_cem[i]), _fmt(js.demand[i]), phase,
                    ])


def write_summary_json(result: SimulationResult, path):
    with open(path, "w") as fh:
        json.dump(result.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")


EXPORT_FILES = {
    "timeseries": "timeseries.csv",
    "fatigue": "fatigue.csv",
    "trajectory": "trajectory.csv",
    "torques": "torques.csv",
    "summary": "summary.json",
}


def export(result: SimulationResult, destination, formats=("csv", "json-summary")) -> list[Path]:
    """Write result files into ``destination`` and return their paths."""
    unknown = set(formats) - {"csv", "json-summary"}
    if unknown:
        raise ValueError(f"unknown export formats: {sorted(unknown)}")
    dest = Path(destination)
    os.makedirs(dest, exist_ok=True)
    written = []
    if "csv" in formats:
        stride = result.scenario.csv_stride
        write_timeseries_csv(result, dest / EXPORT_FILES["timeseries"])
        write_fatigue_csv(result, dest / EXPORT_FILES["fatigue"])
        result.trajectory.write_csv(dest / EXPORT_FILES["trajectory"], stride)
        result.torques.write_csv(dest / EXPORT_FILES["torques"], stride)
        written += [dest / EXPORT_FILES[k] for k in ("timeseries", "fatigue", "trajectory", "torques")]
    if "json-summary" in formats:
        write_summary_json(result, dest / EXPORT_FILES["summary"])
        written.append(dest / EXPORT_FILES["summary"])
    return written


def read_timeseries_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    out = {}
    for j, name in enumerate(header):
        values = [r[j] for r in body]
        out[name] = np.array(values) if name == "phase" else np.array([float(v) for v in values])
    return out
