"""Arm segment parameters from subject height, body mass and gender.

Segment proportions follow the usual Winter-style tables: lengths are
fractions of standing height, masses fractions of body mass, centers of mass
and radii of gyration fractions of the segment length.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields


class Gender(str, enum.Enum):
    MALE = "male"
    FEMALE = "female"


@dataclass(frozen=True)
class Subject:
    height: float  # m
    body_mass: float  # kg
    gender: Gender = Gender.MALE

    def __post_init__(self):
        object.__setattr__(self, "gender", Gender(self.gender))
        if not (math.isfinite(self.height) and self.height > 0):
            raise ValueError(f"height must be > 0 m, got {self.height!r}")
        if not (math.isfinite(self.body_mass) and self.body_mass > 0):
            raise ValueError(f"body_mass must be > 0 kg, got {self.body_mass!r}")


@dataclass(frozen=True)
class ProportionTable:
    """Dimensionless anthropometric ratios for the two arm segments.

    The forearm segment runs from the elbow to the grip (taken at the wrist);
    its mass ratio lumps forearm and hand together.
    """

    upper_arm_length_ratio: float = 0.186
    forearm_hand_length_ratio: float = 0.146
    upper_arm_mass_ratio: float = 0.028
    forearm_hand_mass_ratio: float = 0.022
    com_ratio_upper: float = 0.436
    com_ratio_forearm: float = 0.682
    gyration_ratio_upper: float = 0.322
    gyration_ratio_forearm: float = 0.468

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (0.0 < value < 1.0):
                raise ValueError(f"{f.name} must lie in (0, 1), got {value!r}")


@dataclass(frozen=True)
class BodySegmentSet:
    """Geometric and inertial parameters of the planar upper arm / forearm chain.

    Attributes
    ----------
    L1, L2 : float
        Segment lengths in m (shoulder to elbow, elbow to grip).
    m1, m2 : float
        Segment masses in kg.
    r1, r2 : float
        Distance from the proximal joint to the segment center of mass, m.
    I1, I2 : float
        Moment of inertia about the segment center of mass, kg m^2.
    """

    L1: float
    L2: float
    m1: float
    m2: float
    r1: float
    r2: float
    I1: float
    I2: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{f.name} must be > 0, got {value!r}")
        if not self.r1 < self.L1:
            raise ValueError("r1 must be smaller than L1")
        if not self.r2 < self.L2:
            raise ValueError("r2 must be smaller than L2")


def derive_segments(subject: Subject, table: ProportionTable | None = None) -> BodySegmentSet:
    """Scale the proportion table by the subject's height and body mass."""
    if table is None:
        table = ProportionTable()
    L1 = table.upper_arm_length_ratio * subject.height
    L2 = table.forearm_hand_length_ratio * subject.height
    m1 = table.upper_arm_mass_ratio * subject.body_mass
    m2 = table.forearm_hand_mass_ratio * subject.body_mass
    return BodySegmentSet(
        L1=L1,
        L2=L2,
        m1=m1,
        m2=m2,
        r1=table.com_ratio_upper * L1,
        r2=table.com_ratio_forearm * L2,
        I1=m1 * (table.gyration_ratio_upper * L1) ** 2,
        I2=m2 * (table.gyration_ratio_forearm * L2) ** 2,
    )
