"""Dynamic fatigue of antagonist push/pull muscle groups.

Each joint is driven by a push group and a pull group.  Only the group that
matches the current task phase is loaded; the other holds its state.  For the
loaded group the dimensionless fatigue factor decays as

    R(t) = exp(-k * integral(demand(u) / MVC(theta(u)) du))

and the current exertable maximum torque is ``F_cem(t) = MVC(theta(t)) * R(t)``.
For constant MVC and demand this is the classic constant-load decay
``MVC * exp(-k * F_load * t / MVC)``.

Fatigue rates ``k`` are given per minute; internal time is in seconds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

SECONDS_PER_MINUTE = 60.0
_TINY = np.finfo(float).tiny


class GuardViolation(RuntimeError):
    """The model left its domain of validity (e.g. non-positive MVC)."""


class Phase(str, enum.Enum):
    PUSH = "push"
    PULL = "pull"

    @property
    def code(self) -> int:
        return 0 if self is Phase.PUSH else 1

    @classmethod
    def from_code(cls, code: int) -> "Phase":
        return cls.PUSH if int(code) == 0 else cls.PULL


@dataclass(frozen=True)
class PhaseSchedule:
    T_push: float = 60.0  # s
    T_pull: float = 60.0  # s

    def __post_init__(self):
        if not (self.T_push > 0 and self.T_pull > 0):
            raise ValueError("T_push and T_pull must be > 0")

    @property
    def cycle(self) -> float:
        return self.T_push + self.T_pull


def phase_at(t, schedule: PhaseSchedule):
    """Task phase at time ``t`` (s); the cycle starts with the push phase.

    A scalar ``t`` gives a :class:`Phase`; an array gives integer phase codes
    (0 = push, 1 = pull).
    """
    if np.ndim(t) == 0:
        if t < 0:
            raise ValueError("t must be >= 0")
        return Phase.PUSH if math.fmod(t, schedule.cycle) < schedule.T_push else Phase.PULL
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    return np.where(np.mod(t, schedule.cycle) < schedule.T_push, 0, 1).astype(np.int8)


@dataclass(frozen=True)
class FatigueParams:
    """Fatigue rates in 1/min per muscle group.

    ``k_pull`` defaults to ``k_push``.  ``recovery`` (1/min) pulls an inactive
    group's factor back toward 1; it is zero (no recovery) unless configured.
    """

    k_push: float = 1.0
    k_pull: Optional[float] = None
    recovery: float = 0.0

    def __post_init__(self):
        if self.k_pull is None:
            object.__setattr__(self, "k_pull", self.k_push)
        if self.k_push < 0 or self.k_pull < 0:
            raise ValueError("fatigue rate k must be >= 0")
        if self.recovery < 0:
            raise ValueError("recovery rate must be >= 0")

    def k(self, group: Phase) -> float:
        """Rate for ``group`` in 1/min."""
        return self.k_push if Phase(group) is Phase.PUSH else self.k_pull

    def k_per_second(self, group: Phase) -> float:
        return self.k(group) / SECONDS_PER_MINUTE


@dataclass(frozen=True)
class GroupFatigueState:
    R: float = 1.0
    F_cem: float = math.nan  # N m

    @classmethod
    def fresh(cls, mvc: float) -> "GroupFatigueState":
        return cls(1.0, mvc)


def fatigue_step(
    state: GroupFatigueState,
    demand: float,
    mvc_now: float,
    params: FatigueParams,
    dt: float,
    active: bool,
    group: Phase = Phase.PUSH,
) -> GroupFatigueState:
    """Advance one muscle group by ``dt`` seconds.

    The update multiplies ``R`` by ``exp(-k * demand / mvc_now * dt)``, which
    keeps ``R`` strictly positive for any step size.
    """
    if not mvc_now > 0:
        raise GuardViolation(f"MVC must be > 0, got {mvc_now!r}")
    if demand < 0 or dt < 0:
        raise ValueError("demand and dt must be >= 0")
    R = state.R
    if active:
        R = max(R * math.exp(-params.k_per_second(group) * (demand / mvc_now) * dt), _TINY)
    elif params.recovery > 0:
        R = 1.0 - (1.0 - R) * math.exp(-params.recovery / SECONDS_PER_MINUTE * dt)
    return GroupFatigueState(R, mvc_now * R)


def integrate_group(demand, mvc, active, k_per_min: float, dt: float, recovery_per_min: float = 0.0):
    """Fatigue factor of one group over a uniformly sampled run.

    Sample ``n`` is reached from sample ``n - 1`` with the demand, MVC and
    activity of sample ``n - 1``; ``R[0] = 1``.  Equivalent to composing
    :func:`fatigue_step` along the series.
    """
    demand = np.asarray(demand, dtype=float)
    mvc = np.asarray(mvc, dtype=float)
    active = np.asarray(active, dtype=bool)
    if np.any(mvc <= 0):
        i = int(np.argmax(mvc <= 0))
        raise GuardViolation(f"MVC must be > 0, got {mvc[i]!r} at sample {i}")
    rate = k_per_min / SECONDS_PER_MINUTE
    increments = np.where(active, rate * (demand / mvc) * dt, 0.0)
    if recovery_per_min == 0.0:
        exponent = np.concatenate(([0.0], np.cumsum(increments[:-1])))
        return np.maximum(np.exp(-exponent), _TINY)
    relax = math.exp(-recovery_per_min / SECONDS_PER_MINUTE * dt)
    R = np.empty(len(demand))
    r = 1.0
    for n in range(len(demand)):
        R[n] = r
        if active[n]:
            r = max(r * math.exp(-increments[n]), _TINY)
        else:
            r = 1.0 - (1.0 - r) * relax
    return R


def static_fcem(MVC: float, F_load: float, k: float, t: float) -> float:
    """Capacity after holding a constant load; ``k`` in 1/min, ``t`` in min."""
    return MVC * math.exp(-k * F_load * t / MVC)


@dataclass(frozen=True)
class METResult:
    minutes: float
    immediate_risk: bool = False
    unbounded: bool = False


def met_static(MVC: float, F_load: float, k: float) -> METResult:
    """Maximum endurance time (minutes) under a constant load.

    Solves ``static_fcem(MVC, F_load, k, t) == F_load`` for ``t``.
    """
    if not MVC > 0:
        raise ValueError("MVC must be > 0")
    if F_load < 0 or k < 0:
        raise ValueError("F_load and k must be >= 0")
    if F_load > MVC:
        return METResult(0.0, immediate_risk=True)
    if F_load == 0 or k == 0:
        return METResult(math.inf, unbounded=True)
    return METResult(MVC / (k * F_load) * math.log(MVC / F_load))


def piecewise_capacity(phase_codes, fcem_push, fcem_pull):
    """Capacity of the joint: the active group's current exertable maximum."""
    return np.where(np.asarray(phase_codes) == Phase.PUSH.code, fcem_push, fcem_pull)


@dataclass(frozen=True)
class Crossing:
    time: float  # s, linearly interpolated
    index: int  # first sample with capacity <= demand
    demand: float
    capacity: float

    @property
    def minutes(self) -> float:
        return self.time / SECONDS_PER_MINUTE


def detect_crossing(t, capacity, demand) -> Optional[Crossing]:
    """First time capacity falls to the demand, or ``None``.

    Between the last sample with ``capacity > demand`` and the first with
    ``capacity <= demand`` the crossing is located by linear interpolation.
    """
    t = np.asarray(t, dtype=float)
    capacity = np.asarray(capacity, dtype=float)
    demand = np.asarray(demand, dtype=float)
    if not (t.shape == capacity.shape == demand.shape):
        raise ValueError("time, capacity and demand series must have equal length")
    below = capacity <= demand
    if not below.any():
        return None
    i = int(np.argmax(below))
    if i == 0:
        return Crossing(float(t[0]), 0, float(demand[0]), float(capacity[0]))
    g0 = capacity[i - 1] - demand[i - 1]
    g1 = capacity[i] - demand[i]
    w = g0 / (g0 - g1)
    level = demand[i - 1] + w * (demand[i] - demand[i - 1])
    return Crossing(float(t[i - 1] + w * (t[i] - t[i - 1])), i, float(level), float(level))
