"""Archetype parameter tables and plate spawning.

An archetype maps to distribution bounds for geometry, appearance and
material.  The raw/boiled squash pair shares identical appearance and
geometry bounds but disjoint stiffness ranges, so no pixel-only policy can
separate them.  Broccoli hides a stiff rim behind a soft center region and
banana slices are thin enough that a probe reaches the plate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, PlacementInfeasibleError
from .types import (
    ANGLED_SPEED,
    Appearance,
    ComplianceClass,
    FoodItem,
    MaterialProfile,
    PlateState,
)

# Confounder tags attached to generated examples.
TAG_MISLEADING = "misleading_pair"
TAG_HETEROGENEOUS = "heterogeneous_contact"
TAG_THIN_PLATE = "thin_plate_contact"

_SQUASH_SHAPE = {
    "height": (0.020, 0.026),
    "minor": (0.009, 0.012),
    "aspect": (1.05, 1.30),
    "hue": (0.080, 0.120),
    "saturation": (0.65, 0.85),
}

DEFAULT_ARCHETYPES = {
    "raw_squash": {
        "class": "hard",
        "stiffness": (850.0, 1250.0),
        "fracture": {"mode": "fixed", "range": (30.0, 50.0)},
        "damping": (3.0, 6.0),
        "pierce_frac": 0.55,
        "tags": [TAG_MISLEADING],
        **_SQUASH_SHAPE,
    },
    "boiled_squash": {
        "class": "soft",
        "stiffness": (80.0, 160.0),
        "fracture": {"mode": "headroom", "range": (0.05, 0.55)},
        "damping": (3.0, 8.0),
        "pierce_frac": 0.35,
        "tags": [TAG_MISLEADING],
        **_SQUASH_SHAPE,
    },
    "carrot": {
        "class": "hard",
        "stiffness": (1100.0, 1600.0),
        "fracture": {"mode": "fixed", "range": (35.0, 60.0)},
        "damping": (3.0, 6.0),
        "pierce_frac": 0.55,
        "height": (0.018, 0.024),
        "minor": (0.008, 0.011),
        "aspect": (1.20, 1.50),
        "hue": (0.040, 0.070),
        "saturation": (0.70, 0.90),
        "tags": [],
    },
    "broccoli": {
        "class": "hard",
        "stiffness": (900.0, 1400.0),
        "fracture": {"mode": "fixed", "range": (30.0, 50.0)},
        "damping": (3.0, 6.0),
        "pierce_frac": 0.55,
        "height": (0.022, 0.028),
        "minor": (0.010, 0.013),
        "aspect": (1.00, 1.20),
        "hue": (0.310, 0.350),
        "saturation": (0.50, 0.75),
        # soft floret head over a stiff stem rim
        "subregions": [[0.0, 0.65, 0.12], [0.65, 1.0, 1.0]],
        "tags": [TAG_HETEROGENEOUS],
    },
    "cheddar": {
        "class": "hard",
        "stiffness": (800.0, 1000.0),
        "fracture": {"mode": "fixed", "range": (28.0, 40.0)},
        "damping": (3.0, 6.0),
        "pierce_frac": 0.50,
        "height": (0.016, 0.020),
        "minor": (0.009, 0.012),
        "aspect": (1.00, 1.25),
        "hue": (0.103, 0.127),
        "saturation": (0.72, 0.88),
        "tags": [],
    },
    "banana_slice": {
        "class": "soft",
        "stiffness": (8.0, 12.0),
        "fracture": {"mode": "fixed", "range": (0.8, 1.2)},
        "damping": (0.3, 0.6),
        "pierce_frac": 0.35,
        "height": (0.006, 0.007),
        "minor": (0.011, 0.014),
        "aspect": (1.00, 1.15),
        "hue": (0.140, 0.170),
        "saturation": (0.35, 0.55),
        "tags": [TAG_THIN_PLATE],
    },
    "kiwi": {
        "class": "soft",
        "stiffness": (60.0, 140.0),
        "fracture": {"mode": "headroom", "range": (0.05, 0.60)},
        "damping": (3.0, 8.0),
        "pierce_frac": 0.35,
        "height": (0.018, 0.024),
        "minor": (0.010, 0.013),
        "aspect": (1.00, 1.20),
        "hue": (0.250, 0.290),
        "saturation": (0.55, 0.75),
        "tags": [],
    },
    "tofu": {
        "class": "soft",
        "stiffness": (170.0, 260.0),
        "fracture": {"mode": "headroom", "range": (1.2, 2.5)},
        "damping": (3.0, 8.0),
        "pierce_frac": 0.35,
        "height": (0.016, 0.022),
        "minor": (0.009, 0.012),
        "aspect": (1.00, 1.30),
        "hue": (0.090, 0.150),
        "saturation": (0.04, 0.10),
        "tags": [],
    },
}


def load_archetype_table(path) -> dict:
    """Read an archetype table from a JSON file keyed by archetype name."""
    with open(path) as f:
        raw = json.load(f)
    table = {}
    for name, entry in raw.items():
        entry = dict(entry)
        for key in ("stiffness", "damping", "height", "minor", "aspect", "hue", "saturation"):
            entry[key] = tuple(entry[key])
        entry["fracture"] = {
            "mode": entry["fracture"]["mode"],
            "range": tuple(entry["fracture"]["range"]),
        }
        table[name] = entry
    return table


def dump_archetype_table(table: dict, path) -> None:
    with open(path, "w") as f:
        json.dump(table, f, indent=2, sort_keys=True)


def sample_item(
    name: str,
    item_id: int,
    center: tuple,
    rng: np.random.Generator,
    table: dict | None = None,
) -> FoodItem:
    """Draw one item of an archetype.

    Appearance and geometry are drawn before material so that archetypes with
    identical shape/appearance bounds (the misleading pair) have identical
    appearance distributions regardless of their material bounds.
    """
    table = table or DEFAULT_ARCHETYPES
    if name not in table:
        raise ConfigError(f"unknown archetype {name!r}")
    a = table[name]

    minor = rng.uniform(*a["minor"])
    aspect = rng.uniform(*a["aspect"])
    height = rng.uniform(*a["height"])
    angle = rng.uniform(0.0, math.pi)
    hue = rng.uniform(*a["hue"]) % 1.0
    sat = rng.uniform(*a["saturation"])

    k = rng.uniform(*a["stiffness"])
    c = rng.uniform(*a["damping"])
    frac_cfg = a["fracture"]
    if frac_cfg["mode"] == "fixed":
        fracture = rng.uniform(*frac_cfg["range"])
    elif frac_cfg["mode"] == "headroom":
        # headroom over the peak load of a full-depth angled insertion
        fracture = k * height + ANGLED_SPEED * c + rng.uniform(*frac_cfg["range"])
    else:
        raise ConfigError(f"unknown fracture mode {frac_cfg['mode']!r}")

    subregions = tuple(tuple(s) for s in a.get("subregions", [[0.0, 1.0, 1.0]]))
    material = MaterialProfile(
        stiffness=k,
        fracture_force=fracture,
        compliance_class=ComplianceClass(a["class"]),
        pierce_depth=a["pierce_frac"] * height,
        damping=c,
        subregions=subregions,
    )
    appearance = Appearance(base_hue=hue, saturation=sat, shape_eccentricity=aspect)
    return FoodItem(
        id=item_id,
        center=center,
        height=height,
        major_axis=minor * aspect,
        minor_axis=minor,
        axis_angle=angle,
        material=material,
        appearance=appearance,
        archetype=name,
    )


@dataclass(frozen=True)
class PlateSpec:
    """Plate composition: (archetype, count) pairs plus the plate radius."""

    archetypes: tuple
    plate_radius: float = 0.12
    name: str = "plate"

    @classmethod
    def from_json(cls, obj: dict) -> "PlateSpec":
        pairs = tuple((e["name"], int(e["count"])) for e in obj["archetypes"])
        return cls(
            archetypes=pairs,
            plate_radius=float(obj.get("plate_radius", 0.12)),
            name=str(obj.get("name", "plate")),
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "plate_radius": self.plate_radius,
            "archetypes": [{"name": n, "count": c} for n, c in self.archetypes],
        }

    @property
    def total(self) -> int:
        return sum(c for _, c in self.archetypes)


MAX_PLACEMENT_ATTEMPTS = 10_000


def spawn_plate(spec: PlateSpec, seed: int, table: dict | None = None) -> PlateState:
    """Instantiate a plate; deterministic for a fixed (spec, seed).

    Raises PlacementInfeasibleError when rejection sampling cannot place all
    items without overlap after 10,000 attempts.
    """
    if spec.total > 12:
        raise ConfigError("a plate holds at most 12 items")
    table = table or DEFAULT_ARCHETYPES
    rng = np.random.default_rng(seed)

    names = [n for n, count in spec.archetypes for _ in range(count)]
    items: list[FoodItem] = []
    attempts = 0
    for item_id, name in enumerate(names):
        bounds = table.get(name)
        if bounds is None:
            raise ConfigError(f"unknown archetype {name!r}")
        max_major = bounds["minor"][1] * bounds["aspect"][1]
        while True:
            attempts += 1
            if attempts > MAX_PLACEMENT_ATTEMPTS:
                raise PlacementInfeasibleError(
                    f"could not place {len(names)} items on a "
                    f"{spec.plate_radius:.3f} m plate after {MAX_PLACEMENT_ATTEMPTS} attempts"
                )
            r_max = spec.plate_radius - max_major
            if r_max <= 0:
                continue
            r = math.sqrt(rng.uniform(0.0, 1.0)) * r_max
            theta = rng.uniform(0.0, 2 * math.pi)
            center = (r * math.cos(theta), r * math.sin(theta))
            candidate = sample_item(name, item_id, center, rng, table)
            ok = math.hypot(*center) + candidate.major_axis <= spec.plate_radius
            for other in items:
                d = math.hypot(center[0] - other.center[0], center[1] - other.center[1])
                if d <= candidate.minor_axis + other.minor_axis + 0.002:
                    ok = False
                    break
            if ok:
                items.append(candidate)
                break
    return PlateState(items=items, plate_radius=spec.plate_radius)
