"""Shoulder and elbow torque demand for the planar two-link arm.

Two independent derivations are provided: :func:`inverse_dynamics` runs the
recursive Newton-Euler algorithm (outward kinematic pass, inward force pass),
and :func:`lagrangian_oracle` evaluates the closed-form mass matrix, Coriolis
and gravity terms plus a Jacobian-transpose hand-force term.  They share no
code and are cross-checked in the test suite.

Torques are the moments the muscles must supply, in N m, positive
counter-clockwise.  The held object is a point mass rigidly attached at the
grip.  ``hand_force`` is the horizontal force the hand applies to the object
(positive = push along +x), so the object reacts on the hand with the
opposite force.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .anthropometry import BodySegmentSet
from .fatigue import Phase, PhaseSchedule, phase_at
from .kinematics import JointState, JointTrajectory

STANDARD_GRAVITY = 9.81


@dataclass(frozen=True)
class ExternalLoad:
    hand_force: float = 0.0  # N along +x, push positive
    object_mass: float = 0.0  # kg, point mass at the grip
    gravity: float = STANDARD_GRAVITY  # m/s^2, acts along -y

    def __post_init__(self):
        if not math.isfinite(self.hand_force):
            raise ValueError("hand_force must be finite")
        if not self.object_mass >= 0:
            raise ValueError("object_mass must be >= 0")
        if not self.gravity >= 0:
            raise ValueError("gravity must be >= 0")


@dataclass(frozen=True)
class JointTorques:
    tau_shoulder: float
    tau_elbow: float


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def newton_euler(theta1, theta4, omega1, omega4, alpha1, alpha4, seg: BodySegmentSet, load: ExternalLoad):
    """Array form of the recursive Newton-Euler pass; returns ``(tau_s, tau_e)``."""
    phi1 = theta1
    phi2 = theta1 + theta4
    w1, w2 = omega1, omega1 + omega4
    a1, a2 = alpha1, alpha1 + alpha4
    u1x, u1y = np.cos(phi1), np.sin(phi1)
    u2x, u2y = np.cos(phi2), np.sin(phi2)

    # outward pass; gravity enters as an upward acceleration of the base
    g = load.gravity
    ac1x = -a1 * seg.r1 * u1y - w1 * w1 * seg.r1 * u1x
    ac1y = a1 * seg.r1 * u1x - w1 * w1 * seg.r1 * u1y + g
    aex = -a1 * seg.L1 * u1y - w1 * w1 * seg.L1 * u1x
    aey = a1 * seg.L1 * u1x - w1 * w1 * seg.L1 * u1y + g
    ac2x = aex - a2 * seg.r2 * u2y - w2 * w2 * seg.r2 * u2x
    ac2y = aey + a2 * seg.r2 * u2x - w2 * w2 * seg.r2 * u2y
    ahx = aex - a2 * seg.L2 * u2y - w2 * w2 * seg.L2 * u2x
    ahy = aey + a2 * seg.L2 * u2x - w2 * w2 * seg.L2 * u2y

    # inward pass; f_tip is the force the forearm exerts on the outside world
    tipx = load.hand_force + load.object_mass * ahx
    tipy = load.object_mass * ahy
    f2x = seg.m2 * ac2x + tipx
    f2y = seg.m2 * ac2y + tipy
    n2 = (
        seg.I2 * a2
        + _cross(seg.r2 * u2x, seg.r2 * u2y, seg.m2 * ac2x, seg.m2 * ac2y)
        + _cross(seg.L2 * u2x, seg.L2 * u2y, tipx, tipy)
    )
    n1 = (
        seg.I1 * a1
        + _cross(seg.r1 * u1x, seg.r1 * u1y, seg.m1 * ac1x, seg.m1 * ac1y)
        + _cross(seg.L1 * u1x, seg.L1 * u1y, f2x, f2y)
        + n2
    )
    return n1, n2


def inverse_dynamics(state: JointState, segments: BodySegmentSet, load: ExternalLoad) -> JointTorques:
    """Joint torques for one state via recursive Newton-Euler."""
    tau_s, tau_e = newton_euler(
        state.theta1, state.theta4, state.omega1, state.omega4, state.alpha1, state.alpha4, segments, load
    )
    return JointTorques(float(tau_s), float(tau_e))


def lagrangian_oracle(state: JointState, segments: BodySegmentSet, load: ExternalLoad) -> JointTorques:
    """Joint torques from the closed-form equations of motion.

    ``tau = M(q) qdd + c(q, qd) + g(q) + J(q)^T F``
    """
    s = segments
    mo = load.object_mass
    q1, q2 = state.theta1, state.theta4
    qd1, qd2 = state.omega1, state.omega4
    qdd1, qdd2 = state.alpha1, state.alpha4
    c2, s2 = math.cos(q2), math.sin(q2)
    c1, s1 = math.cos(q1), math.sin(q1)
    c12, s12 = math.cos(q1 + q2), math.sin(q1 + q2)

    m22 = s.I2 + s.m2 * s.r2**2 + mo * s.L2**2
    m12 = m22 + (s.m2 * s.r2 + mo * s.L2) * s.L1 * c2
    m11 = s.I1 + s.m1 * s.r1**2 + (s.m2 + mo) * s.L1**2 + m22 + 2.0 * (s.m2 * s.r2 + mo * s.L2) * s.L1 * c2
    h = (s.m2 * s.r2 + mo * s.L2) * s.L1 * s2
    cor1 = -h * (2.0 * qd1 * qd2 + qd2**2)
    cor2 = h * qd1**2
    g = load.gravity
    grav2 = g * (s.m2 * s.r2 + mo * s.L2) * c12
    grav1 = g * (s.m1 * s.r1 + (s.m2 + mo) * s.L1) * c1 + grav2
    # J^T F with F = (hand_force, 0)
    f1 = (-s.L1 * s1 - s.L2 * s12) * load.hand_force
    f2 = -s.L2 * s12 * load.hand_force

    tau1 = m11 * qdd1 + m12 * qdd2 + cor1 + grav1 + f1
    tau2 = m12 * qdd1 + m22 * qdd2 + cor2 + grav2 + f2
    return JointTorques(tau1, tau2)


@dataclass(frozen=True)
class LoadSchedule:
    """External load in force during each phase of the push/pull cycle."""

    push: ExternalLoad
    pull: ExternalLoad
    schedule: PhaseSchedule

    def load_for(self, phase: Phase) -> ExternalLoad:
        return self.push if Phase(phase) is Phase.PUSH else self.pull


@dataclass(frozen=True)
class TorqueSeries:
    t: np.ndarray
    tau_shoulder: np.ndarray
    tau_elbow: np.ndarray

    CSV_COLUMNS = ("t", "tau_shoulder_Nm", "tau_elbow_Nm")

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> JointTorques:
        return JointTorques(float(self.tau_shoulder[i]), float(self.tau_elbow[i]))

    def write_csv(self, path, stride: int = 1):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.CSV_COLUMNS)
            for i in range(0, len(self), stride):
                writer.writerow([repr(float(self.t[i])), repr(float(self.tau_shoulder[i])), repr(float(self.tau_elbow[i]))])


def torque_series(trajectory: JointTrajectory, segments: BodySegmentSet, loads: LoadSchedule) -> TorqueSeries:
    """Torque demand at every trajectory sample using that sample's phase load."""
    phases = phase_at(trajectory.t, loads.schedule)
    push = phases == Phase.PUSH.code
    tr = trajectory
    args = (tr.theta1, tr.theta4, tr.omega1, tr.omega4, tr.alpha1, tr.alpha4, segments)
    ts_push, te_push = newton_euler(*args, loads.push)
    ts_pull, te_pull = newton_euler(*args, loads.pull)
    return TorqueSeries(
        t=tr.t,
        tau_shoulder=np.where(push, ts_push, ts_pull),
        tau_elbow=np.where(push, te_push, te_pull),
    )
