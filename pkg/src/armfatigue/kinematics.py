"""Planar shoulder/elbow kinematics and hand-path driven joint trajectories.

Angle conventions
-----------------
``theta1`` is the upper-arm angle measured counter-clockwise from the
horizontal x axis at the shoulder (negative below horizontal).  ``theta4`` is
the elbow flexion angle: the counter-clockwise rotation of the forearm relative
to the upper-arm axis, so ``theta4 = 0`` is a straight arm and the forearm's
absolute angle is ``theta1 + theta4``.  With the hand in front of the shoulder,
``theta4 in (0, pi)`` puts the elbow below the shoulder-hand line
(``elbow_down``); ``theta4 in (-pi, 0)`` is the mirrored ``elbow_up`` branch.

Out-of-plane joints of the full arm model are held at zero and not modeled.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .anthropometry import BodySegmentSet


class KinematicsError(ValueError):
    pass


class UnreachableTargetError(KinematicsError):
    pass


class SingularConfigurationError(KinematicsError):
    pass


class Branch(str, enum.Enum):
    ELBOW_DOWN = "elbow_down"
    ELBOW_UP = "elbow_up"


class Profile(str, enum.Enum):
    COSINE_SMOOTH = "cosine_smooth"
    CONSTANT_VELOCITY = "constant_velocity"


@dataclass(frozen=True)
class JointState:
    theta1: float
    theta4: float
    omega1: float = 0.0
    omega4: float = 0.0
    alpha1: float = 0.0
    alpha4: float = 0.0

    def __post_init__(self):
        for name in ("theta1", "theta4", "omega1", "omega4", "alpha1", "alpha4"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class HandPath:
    """Horizontal back-and-forth grip path at a fixed height.

    One ``stroke_period`` covers the outward stroke ``x_start -> x_end`` and the
    return stroke, each taking half the period.
    """

    x_start: float
    x_end: float
    y_hand: float
    profile: Profile = Profile.COSINE_SMOOTH
    stroke_period: float = 120.0

    def __post_init__(self):
        object.__setattr__(self, "profile", Profile(self.profile))
        if self.x_start == self.x_end:
            raise ValueError("x_start and x_end must differ")
        if not self.stroke_period > 0:
            raise ValueError("stroke_period must be > 0")

    def reachability_problems(self, segments: BodySegmentSet) -> list[str]:
        """Describe every endpoint of the path that leaves the open annulus.

        The path is a horizontal segment, so the distance to the shoulder is
        extremal at the endpoints or at the foot of the perpendicular.
        """
        inner, outer = abs(segments.L1 - segments.L2), segments.L1 + segments.L2
        lo, hi = sorted((self.x_start, self.x_end))
        candidates = {"x_start": self.x_start, "x_end": self.x_end}
        if lo < 0.0 < hi:
            candidates["closest point"] = 0.0
        problems = []
        for label, x in candidates.items():
            r = math.hypot(x, self.y_hand)
            if not inner < r < outer:
                problems.append(
                    f"{label} ({x:.6g}, {self.y_hand:.6g}) m lies at distance {r:.6g} m, "
                    f"outside the reachable annulus ({inner:.6g}, {outer:.6g}) m"
                )
        return problems

    def sample(self, t):
        """Hand position, velocity and acceleration along x at times ``t``."""
        t = np.asarray(t, dtype=float)
        span = self.x_end - self.x_start
        period = self.stroke_period
        if self.profile is Profile.COSINE_SMOOTH:
            w = 2.0 * math.pi / period
            x = self.x_start + 0.5 * span * (1.0 - np.cos(w * t))
            v = 0.5 * span * w * np.sin(w * t)
            a = 0.5 * span * w * w * np.cos(w * t)
        else:
            s = np.mod(t, period) / period
            outward = s < 0.5
            speed = 2.0 * span / period
            x = np.where(outward, self.x_start + 2.0 * span * s, self.x_end - 2.0 * span * (s - 0.5))
            v = np.where(outward, speed, -speed)
            a = np.zeros_like(x)
        return x, v, a


def forward_kinematics(state: JointState, segments: BodySegmentSet) -> tuple[float, float]:
    """Grip position ``(x, y)`` in meters with the shoulder at the origin."""
    x, y = _fk(state.theta1, state.theta4, segments)
    return float(x), float(y)


def _fk(theta1, theta4, seg: BodySegmentSet):
    phi2 = theta1 + theta4
    x = seg.L1 * np.cos(theta1) + seg.L2 * np.cos(phi2)
    y = seg.L1 * np.sin(theta1) + seg.L2 * np.sin(phi2)
    return x, y


def _ik(x, y, seg: BodySegmentSet, branch: Branch):
    """Vectorized inverse kinematics; returns angles and a reachability mask."""
    L1, L2 = seg.L1, seg.L2
    r2 = x * x + y * y
    outer = (L1 + L2) ** 2 - r2
    inner = r2 - (L1 - L2) ** 2
    ok = (outer > 0) & (inner > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        # half-angle form stays accurate close to full extension
        theta4 = 2.0 * np.arctan(np.sqrt(np.where(ok, outer / inner, np.nan)))
    if Branch(branch) is Branch.ELBOW_UP:
        theta4 = -theta4
    theta1 = np.arctan2(y, x) - np.arctan2(L2 * np.sin(theta4), L1 + L2 * np.cos(theta4))
    theta1 = np.mod(theta1 + math.pi, 2.0 * math.pi) - math.pi
    return theta1, theta4, ok, outer, inner


def inverse_kinematics(
    hand: tuple[float, float],
    segments: BodySegmentSet,
    branch: Branch | str = Branch.ELBOW_DOWN,
) -> tuple[float, float]:
    """Joint angles ``(theta1, theta4)`` placing the grip at ``hand``.

    Raises
    ------
    SingularConfigurationError
        If the target lies exactly on the boundary of the workspace.
    UnreachableTargetError
        If the target lies outside the workspace.
    """
    x, y = float(hand[0]), float(hand[1])
    theta1, theta4, ok, outer, inner = _ik(np.float64(x), np.float64(y), segments, branch)
    if not ok:
        r = math.hypot(x, y)
        if outer == 0 or inner == 0:
            raise SingularConfigurationError(f"target ({x}, {y}) lies on the workspace boundary (r = {r})")
        raise UnreachableTargetError(
            f"target ({x}, {y}) at r = {r} is outside the reachable annulus "
            f"({abs(segments.L1 - segments.L2)}, {segments.L1 + segments.L2})"
        )
    return float(theta1), float(theta4)


def jacobian(theta1, theta4, seg: BodySegmentSet):
    """Grip Jacobian entries ``(j11, j12, j21, j22)``, broadcasting over arrays."""
    phi2 = theta1 + theta4
    s1, c1 = np.sin(theta1), np.cos(theta1)
    s12, c12 = np.sin(phi2), np.cos(phi2)
    return (
        -seg.L1 * s1 - seg.L2 * s12,
        -seg.L2 * s12,
        seg.L1 * c1 + seg.L2 * c12,
        seg.L2 * c12,
    )


def joint_rates(theta1, theta4, hand_vel, hand_acc, seg: BodySegmentSet):
    """Map Cartesian grip velocity/acceleration to joint rates.

    Solves ``J qd = v`` and ``J qdd = a - Jdot qd``.
    """
    vx, vy = hand_vel
    ax, ay = hand_acc
    j11, j12, j21, j22 = jacobian(theta1, theta4, seg)
    det = j11 * j22 - j12 * j21
    omega1 = (j22 * vx - j12 * vy) / det
    omega4 = (-j21 * vx + j11 * vy) / det
    phi2 = theta1 + theta4
    w2 = omega1 + omega4
    # Jdot qd: centripetal part of the grip acceleration
    bx = -seg.L1 * np.cos(theta1) * omega1**2 - seg.L2 * np.cos(phi2) * w2**2
    by = -seg.L1 * np.sin(theta1) * omega1**2 - seg.L2 * np.sin(phi2) * w2**2
    rx, ry = ax - bx, ay - by
    alpha1 = (j22 * rx - j12 * ry) / det
    alpha4 = (-j21 * rx + j11 * ry) / det
    return omega1, omega4, alpha1, alpha4


@dataclass(frozen=True)
class JointTrajectory:
    """Uniformly sampled shoulder/elbow motion; all angles in radians."""

    t: np.ndarray
    theta1: np.ndarray
    theta4: np.ndarray
    omega1: np.ndarray
    omega4: np.ndarray
    alpha1: np.ndarray
    alpha4: np.ndarray

    CSV_COLUMNS = ("t", "theta1", "theta4", "omega1", "omega4", "alpha1", "alpha4")

    def __post_init__(self):
        n = len(self.t)
        for name in self.CSV_COLUMNS:
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("time must be strictly increasing")

    def __len__(self):
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def state(self, i: int) -> JointState:
        return JointState(*(float(getattr(self, name)[i]) for name in self.CSV_COLUMNS[1:]))

    def __iter__(self) -> Iterator[tuple[float, JointState]]:
        for i in range(len(self)):
            yield float(self.t[i]), self.state(i)

    def write_csv(self, path, stride: int = 1):
        """Write ``t`` in seconds, angles in degrees, rates in deg/s and deg/s^2."""
        deg = 180.0 / math.pi
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.CSV_COLUMNS)
            for i in range(0, len(self), stride):
                row = [self.t[i]] + [getattr(self, c)[i] * deg for c in self.CSV_COLUMNS[1:]]
                writer.writerow([repr(float(v)) for v in row])


def sample_times(dt: float, duration: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if duration < 0:
        raise ValueError("duration must be >= 0")
    n = int(math.floor(duration / dt + 1e-9)) + 1
    return np.arange(n, dtype=float) * dt


def generate_trajectory(
    path: HandPath,
    segments: BodySegmentSet,
    dt: float,
    duration: float,
    branch: Branch | str = Branch.ELBOW_DOWN,
) -> JointTrajectory:
    """Sample the hand path and map it to joint space.

    Joint velocities and accelerations come from the analytic derivatives of
    the hand profile pushed through the differential kinematics.
    """
    t = sample_times(dt, duration)
    x, vx, ax = path.sample(t)
    y = np.full_like(x, path.y_hand)
    theta1, theta4, ok, outer, inner = _ik(x, y, segments, branch)
    if not np.all(ok):
        i = int(np.argmin(ok))
        kind = SingularConfigurationError if (outer[i] == 0 or inner[i] == 0) else UnreachableTargetError
        raise kind(f"hand target ({x[i]}, {y[i]}) at t = {t[i]} s is not reachable")
    zeros = np.zeros_like(x)
    omega1, omega4, alpha1, alpha4 = joint_rates(theta1, theta4, (vx, zeros), (ax, zeros), segments)
    return JointTrajectory(t, theta1, theta4, omega1, omega4, alpha1, alpha4)
