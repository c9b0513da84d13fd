"""Core domain types for the desk-scale plate world.

All lengths are in meters, forces in newtons, angles in radians and time in
seconds unless a name says otherwise.  The haptic channel is a scalar force
magnitude sampled at 1 kHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

# World-level constants shared by the contact model and the primitives.
PLATE_Z = 0.0
PLATE_STIFFNESS = 6000.0        # N/m, rigid dinner plate
PLATE_MAX_COMPRESSION = 0.002   # m, fork may never sink further into the plate
CONTACT_THRESHOLD = 0.1         # N, probe contact-detection level
FORCE_LIMIT = 25.0              # N, wrist sensor safety limit
CONTROL_DT = 0.05               # s, 20 Hz controller tick
SENSOR_DT = 0.001               # s, 1 kHz force sensing / integration substep
PROBE_SPEED = 0.02              # m/s descent during probing
VERTICAL_SPEED = 0.17           # m/s descent of the vertical skewer
ANGLED_SPEED = 0.08             # m/s descent of the angled skewer
ANGLED_TILT = math.radians(65.0)
SCOOP_PITCH = math.radians(80.0)
APPROACH_HEIGHT = 0.01          # m above the (estimated) item top
TRACE_LEN = 26                  # samples per haptic window
FORCE_NOISE_STD = 0.05          # N, per-sample sensor noise
HARD_MIN_STIFFNESS = 800.0
SOFT_MAX_STIFFNESS = 300.0


class Primitive(Enum):
    PROBE = "probe"
    VERTICAL_SKEWER = "vertical_skewer"
    ANGLED_SKEWER = "angled_skewer"
    SCOOP = "scoop"


class ComplianceClass(Enum):
    HARD = "hard"
    SOFT = "soft"


class FailureMode(Enum):
    NONE = "none"
    MISS = "miss"
    DROP_AFTER_SKEWER = "drop"
    UNSTABLE = "unstable"
    DAMAGE = "damage"
    DETECTION_MISS = "detection"
    EXCEEDED_RETRIES = "retries"


@dataclass(frozen=True)
class MaterialProfile:
    """Piecewise-linear elastic material with a post-fracture plateau.

    ``subregions`` is a list of (radial_lo, radial_hi, stiffness_multiplier)
    triples whose radial-fraction ranges partition [0, 1]; it encodes
    stem/head-style heterogeneity without mesh geometry.
    """

    stiffness: float                 # N/m local spring constant at multiplier 1
    fracture_force: float            # N, static strength
    compliance_class: ComplianceClass
    pierce_depth: float              # m, depth at which tines count as engaged
    damping: float = 0.0             # N*s/m rate-dependent load while compressing
    subregions: tuple = ((0.0, 1.0, 1.0),)

    def __post_init__(self):
        if self.stiffness <= 0 or self.fracture_force <= 0:
            raise ValueError("stiffness and fracture_force must be positive")
        if self.compliance_class is ComplianceClass.HARD and self.stiffness < HARD_MIN_STIFFNESS:
            raise ValueError("hard materials require stiffness >= 800 N/m")
        if self.compliance_class is ComplianceClass.SOFT and self.stiffness > SOFT_MAX_STIFFNESS:
            raise ValueError("soft materials require stiffness <= 300 N/m")
        if any(m <= 0 for _, _, m in self.subregions):
            raise ValueError("subregion multipliers must be positive")
        lo = 0.0
        for a, b, _ in self.subregions:
            if not math.isclose(a, lo, abs_tol=1e-9) or b <= a:
                raise ValueError("subregion ranges must partition [0, 1]")
            lo = b
        if not math.isclose(lo, 1.0, abs_tol=1e-9):
            raise ValueError("subregion ranges must partition [0, 1]")

    def multiplier_at(self, radial_fraction: float) -> float:
        r = min(max(radial_fraction, 0.0), 1.0)
        for _, b, m in self.subregions[:-1]:
            if r < b:
                return m
        return self.subregions[-1][2]

    def max_multiplier(self) -> float:
        return max(m for _, _, m in self.subregions)


@dataclass(frozen=True)
class Appearance:
    base_hue: float            # [0, 1)
    saturation: float          # [0, 1]
    shape_eccentricity: float  # major/minor semi-axis ratio, >= 1


@dataclass(frozen=True)
class FoodItem:
    id: int
    center: tuple              # (x, y) m
    height: float
    major_axis: float          # semi-axis, m
    minor_axis: float          # semi-axis, m
    axis_angle: float          # rad, orientation of the major axis
    material: MaterialProfile
    appearance: Appearance
    archetype: str

    def __post_init__(self):
        if not (self.major_axis >= self.minor_axis > 0):
            raise ValueError("require major_axis >= minor_axis > 0")
        if not (0 < self.height <= 0.05):
            raise ValueError("height must lie in (0, 0.05] m")

    def radial_fraction(self, point: tuple) -> float:
        """Normalized elliptical radius of a world (x, y); 1.0 on the rim."""
        dx = point[0] - self.center[0]
        dy = point[1] - self.center[1]
        c, s = math.cos(self.axis_angle), math.sin(self.axis_angle)
        u = c * dx + s * dy
        v = -s * dx + c * dy
        return math.hypot(u / self.major_axis, v / self.minor_axis)

    def contains(self, point: tuple) -> bool:
        return self.radial_fraction(point) <= 1.0

    @property
    def top_z(self) -> float:
        return PLATE_Z + self.height


@dataclass
class PlateState:
    items: list
    plate_radius: float = 0.12
    plate_z: float = PLATE_Z
    plate_stiffness: float = PLATE_STIFFNESS

    def __post_init__(self):
        if not (0 <= len(self.items) <= 12):
            raise ValueError("a plate holds between 0 and 12 items")
        for i, a in enumerate(self.items):
            if math.hypot(*a.center) + a.major_axis > self.plate_radius + 1e-12:
                raise ValueError(f"item {a.id} extends beyond the plate rim")
            for b in self.items[i + 1:]:
                d = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
                if d <= a.minor_axis + b.minor_axis:
                    raise ValueError(f"items {a.id} and {b.id} overlap")

    def item_at(self, point: tuple):
        for item in self.items:
            if item.contains(point):
                return item
        return None

    def get(self, item_id: int) -> FoodItem:
        for item in self.items:
            if item.id == item_id:
                return item
        raise KeyError(f"no item with id {item_id}")


def remove_item(plate: PlateState, item_id: int) -> PlateState:
    """Return a new plate without ``item_id``; other items are untouched."""
    kept = [it for it in plate.items if it.id != item_id]
    if len(kept) == len(plate.items):
        raise KeyError(f"no item with id {item_id}")
    return replace(plate, items=kept)


@dataclass(frozen=True)
class ForkState:
    position: tuple = (0.0, 0.0, 0.08)   # (x, y, z) of the tine tips
    pitch: float = 0.0                   # beta, rad
    roll: float = 0.0                    # gamma, rad
    tine_engagement_depth: float = 0.0
    tines_inserted: int = 0

    def __post_init__(self):
        if self.position[2] < PLATE_Z - PLATE_MAX_COMPRESSION - 1e-12:
            raise ValueError("fork below plate compression limit")
        if not (0.0 <= self.pitch <= math.pi / 2 + 1e-12):
            raise ValueError("pitch must lie in [0, pi/2]")
        if self.tines_inserted not in (0, 1, 2, 3, 4):
            raise ValueError("tines_inserted must be 0..4")


@dataclass(frozen=True)
class Action:
    """The fork action tuple: start pose, vertical travel, roll and tilt."""

    x: float
    y: float
    z: float
    dz: float                   # commanded vertical travel, <= 0 for skewers
    roll: float                 # gamma
    dbeta: float                # tilt added during the motion, >= 0
    primitive: Primitive

    def __post_init__(self):
        if self.dbeta < 0:
            raise ValueError("dbeta must be >= 0")
        if self.primitive in (Primitive.VERTICAL_SKEWER, Primitive.ANGLED_SKEWER) and self.dz > 0:
            raise ValueError("skewer primitives move downward (dz <= 0)")
        if self.primitive is Primitive.PROBE and self.dbeta != 0.0:
            raise ValueError("probe actions carry no tilt")


@dataclass(frozen=True)
class HapticTrace:
    samples: np.ndarray              # (26,) force magnitudes, N
    sample_period: float = SENSOR_DT
    contact_onset_index: int = 0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.shape != (TRACE_LEN,):
            raise ValueError(f"a haptic trace has exactly {TRACE_LEN} samples")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("trace samples must be finite and >= 0")
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True)
class TrialOutcome:
    loss: int
    failure_mode: FailureMode
    peak_force: float
    insertion_depth: float
    tines_inserted: int

    def __post_init__(self):
        if (self.loss == 0) != (self.failure_mode is FailureMode.NONE):
            raise ValueError("loss == 0 iff failure_mode is NONE")
