"""Fitting the unreported case-study constants.

The hand height is chosen so that inverse kinematics over the stroke best
reproduces the reported joint-angle ranges; the strength scale factors are
picked from sweeps of crossing time against scale.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.optimize import minimize_scalar

from .anthropometry import BodySegmentSet
from .kinematics import Branch, inverse_kinematics
from .scenario import Scenario, StrengthSettings, run

# reported (x, theta1, theta4) at both ends of the stroke, degrees
REFERENCE_ANGLES = ((0.3, -49.3, 124.1), (0.4, -42.3, 101.3))


def angle_residuals(y_hand: float, segments: BodySegmentSet, branch=Branch.ELBOW_DOWN, reference=REFERENCE_ANGLES):
    """Per-endpoint ``(theta1, theta4)`` errors in degrees at hand height ``y_hand``."""
    out = []
    for x, t1_ref, t4_ref in reference:
        t1, t4 = inverse_kinematics((x, y_hand), segments, branch)
        out.append((math.degrees(t1) - t1_ref, math.degrees(t4) - t4_ref))
    return np.array(out)


def calibrate_y_hand(segments: BodySegmentSet, branch=Branch.ELBOW_DOWN, reference=REFERENCE_ANGLES, bounds=(-0.3, 0.3)):
    """Least-squares hand height (m) over the reference endpoint angles."""

    def cost(y):
        try:
            return float(np.sum(angle_residuals(y, segments, branch, reference) ** 2))
        except ValueError:
            return math.inf

    res = minimize_scalar(cost, bounds=bounds, method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def crossing_sweep(scenario: Scenario, joint: str, scales) -> list[tuple[float, float | None]]:
    """Crossing time (min) of ``joint`` for each strength scale factor."""
    key = "g_scale_shoulder" if joint == "shoulder" else "g_scale_elbow"
    out = []
    for scale in scales:
        strength: StrengthSettings = replace(scenario.strength, **{key: float(scale)})
        result = run(replace(scenario, strength=strength))
        c = result.crossings[joint]
        out.append((float(scale), None if c is None else c.minutes))
    return out
