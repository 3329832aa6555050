"""Posture-dependent elbow and shoulder strength (MVC torque, N m).

Chaffin-type regressions, evaluated with the coefficients exactly as given::

    elbow    = (336.29  + 1.544 * a_e - 0.0085 * a_s**2) * G
    shoulder = (227.338 + 0.525 * a_e - 0.296  * a_s)    * G

where ``a_e`` and ``a_s`` are posture angles in degrees and ``G`` is a gender
adjustment factor.  The quadratic elbow term uses ``a_s`` as printed; the
coefficients are fields so the variant with ``a_e**2`` can be configured.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .anthropometry import Gender
from .kinematics import JointState

VALIDITY_WINDOW = (0.0, 180.0)  # degrees

# external-literature gender factors (elbow, shoulder); not fitted to any data here
DEFAULT_G = {
    Gender.MALE: (0.1913, 0.2845),
    Gender.FEMALE: (0.1005, 0.1495),
}


class AngleMapping(str, enum.Enum):
    """How joint angles become regression inputs.

    ``published``: ``a_e = theta1`` and ``a_s = 180 - theta4`` (degrees), taken
    verbatim even though it feeds the shoulder angle into the "elbow" input.
    ``anatomical``: ``a_e`` is the included elbow angle ``180 - theta4`` and
    ``a_s`` the shoulder elevation from a hanging arm, ``theta1 + 90``.
    """

    PUBLISHED = "published"
    ANATOMICAL = "anatomical"


@dataclass(frozen=True)
class StrengthModel:
    c0: float = 336.29
    c1: float = 1.544
    c2: float = 0.0085
    d0: float = 227.338
    d1: float = 0.525
    d2: float = 0.296
    G_elbow: float = 1.0
    G_shoulder: float = 1.0
    # evaluate the elbow quadratic in a_e instead of a_s
    elbow_quadratic_in_ae: bool = False

    def __post_init__(self):
        for name in ("c0", "c1", "c2", "d0", "d1", "d2", "G_elbow", "G_shoulder"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.G_elbow < 0 or self.G_shoulder < 0:
            raise ValueError("gender factors must be >= 0")

    @classmethod
    def for_gender(cls, gender: Gender | str, scale_elbow: float = 1.0, scale_shoulder: float = 1.0, **kw):
        g_e, g_s = DEFAULT_G[Gender(gender)]
        return cls(G_elbow=g_e * scale_elbow, G_shoulder=g_s * scale_shoulder, **kw)

    def with_g(self, G: float) -> "StrengthModel":
        return replace(self, G_elbow=G, G_shoulder=G)


def strength_elbow(alpha_e, alpha_s, model: StrengthModel):
    quad = alpha_e if model.elbow_quadratic_in_ae else alpha_s
    return (model.c0 + model.c1 * alpha_e - model.c2 * quad**2) * model.G_elbow


def strength_shoulder(alpha_e, alpha_s, model: StrengthModel):
    return (model.d0 + model.d1 * alpha_e - model.d2 * alpha_s) * model.G_shoulder


def window_warnings(alpha_e, alpha_s) -> list[str]:
    lo, hi = VALIDITY_WINDOW
    out = []
    for name, value in (("alpha_e", alpha_e), ("alpha_s", alpha_s)):
        v = np.asarray(value, dtype=float)
        bad = (v < lo) | (v > hi)
        if np.any(bad):
            if v.ndim == 0:
                out.append(f"{name} = {float(v):.4f} deg is outside the validity window [{lo:g}, {hi:g}] deg")
            else:
                out.append(
                    f"{name} outside the validity window [{lo:g}, {hi:g}] deg for "
                    f"{int(bad.sum())} of {v.size} samples (range {v.min():.4f} to {v.max():.4f} deg)"
                )
    return out


def regression_angles(theta1, theta4, mapping: AngleMapping | str = AngleMapping.PUBLISHED):
    """Convert joint angles (rad) to regression inputs ``(a_e, a_s)`` in degrees."""
    t1 = np.degrees(theta1)
    t4 = np.degrees(theta4)
    if AngleMapping(mapping) is AngleMapping.PUBLISHED:
        return t1, 180.0 - t4
    return 180.0 - t4, t1 + 90.0


@dataclass(frozen=True)
class MVCResult:
    shoulder: float
    elbow: float
    alpha_e: float
    alpha_s: float
    warnings: tuple[str, ...] = field(default_factory=tuple)


def mvc_at(state: JointState, model: StrengthModel, mapping: AngleMapping | str = AngleMapping.PUBLISHED) -> MVCResult:
    """Shoulder and elbow MVC (N m) at the posture of ``state``."""
    a_e, a_s = regression_angles(state.theta1, state.theta4, mapping)
    a_e, a_s = float(a_e), float(a_s)
    return MVCResult(
        shoulder=float(strength_shoulder(a_e, a_s, model)),
        elbow=float(strength_elbow(a_e, a_s, model)),
        alpha_e=a_e,
        alpha_s=a_s,
        warnings=tuple(window_warnings(a_e, a_s)),
    )


def mvc_series(theta1, theta4, model: StrengthModel, mapping: AngleMapping | str = AngleMapping.PUBLISHED):
    """Array version of :func:`mvc_at`: ``(mvc_shoulder, mvc_elbow, warnings)``."""
    a_e, a_s = regression_angles(np.asarray(theta1), np.asarray(theta4), mapping)
    return strength_shoulder(a_e, a_s, model), strength_elbow(a_e, a_s, model), window_warnings(a_e, a_s)


def strength_table(alpha_e_values, alpha_s_values, model: StrengthModel):
    """Rows ``(a_e, a_s, elbow, shoulder)`` over the Cartesian product of angles."""
    rows = []
    for a_e in alpha_e_values:
        for a_s in alpha_s_values:
            rows.append((a_e, a_s, strength_elbow(a_e, a_s, model), strength_shoulder(a_e, a_s, model)))
    return rows
