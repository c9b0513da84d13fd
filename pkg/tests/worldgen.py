"""Shared builders for hand-specified test items and plates."""

import numpy as np

from skewersim.simworld import (
    Appearance,
    ComplianceClass,
    FoodItem,
    ForkState,
    MaterialProfile,
    PlateState,
    execute_primitive,
    probe_action,
)


def make_item(stiffness=1000.0, fracture=60.0, height=0.02, cls=ComplianceClass.HARD,
              subregions=((0.0, 1.0, 1.0),), minor=0.010, major=0.012, damping=0.0,
              center=(0.0, 0.0), axis_angle=0.0, item_id=0, hue=0.1, sat=0.7,
              pierce_frac=0.5, archetype="test"):
    mat = MaterialProfile(
        stiffness=stiffness,
        fracture_force=fracture,
        compliance_class=cls,
        pierce_depth=pierce_frac * height,
        damping=damping,
        subregions=subregions,
    )
    return FoodItem(
        id=item_id, center=center, height=height, major_axis=major, minor_axis=minor,
        axis_angle=axis_angle, material=mat,
        appearance=Appearance(base_hue=hue, saturation=sat, shape_eccentricity=major / minor),
        archetype=archetype,
    )


def single_item_plate(**kwargs):
    item = make_item(**kwargs)
    return PlateState(items=[item]), item


def probe_at(plate, x, y, z, rng=None, noise=0.0):
    fork = ForkState(position=(x, y, z))
    act = probe_action(x, y, z)
    return execute_primitive(plate, fork, act, rng or np.random.default_rng(0),
                             force_noise_std=noise)
