"""Quasistatic contact-force model.

The force seen when pressing into an item is a local linear spring up to the
material's static strength, a flat post-fracture plateau beyond it, and the
plate's much stiffer spring once penetration exceeds the item height (thin
items let the tines reach the plate, which is the classic confounder for a
haptics-only policy).
"""

from __future__ import annotations

from .types import PLATE_STIFFNESS, FoodItem

POST_FRACTURE_PLATEAU = 0.25  # fraction of fracture_force carried after yield


def local_stiffness(item: FoodItem, contact_point: tuple) -> float:
    """Spring constant at a world (x, y), zero outside the item footprint."""
    r = item.radial_fraction(contact_point)
    if r > 1.0:
        return 0.0
    return item.material.stiffness * item.material.multiplier_at(r)


def contact_force(
    item: FoodItem,
    contact_point: tuple,
    penetration: float,
    plate_stiffness: float = PLATE_STIFFNESS,
) -> float:
    """Force in newtons at ``penetration`` meters below the item top surface.

    Outside the item footprint the item contributes nothing (the caller is
    pressing on bare plate, which engages below plate_z instead).
    """
    if penetration < 0:
        raise ValueError("penetration must be >= 0")
    if penetration == 0.0:
        return 0.0
    k = local_stiffness(item, contact_point)
    if k == 0.0:
        return 0.0
    depth_in_item = min(penetration, item.height)
    spring = k * depth_in_item
    if spring > item.material.fracture_force:
        item_part = POST_FRACTURE_PLATEAU * item.material.fracture_force
    else:
        item_part = spring
    plate_part = plate_stiffness * max(0.0, penetration - item.height)
    return item_part + plate_part


def plate_force(z: float, plate_z: float = 0.0, plate_stiffness: float = PLATE_STIFFNESS) -> float:
    """Reaction of the bare plate on a fork tip at height ``z``."""
    return plate_stiffness * max(0.0, plate_z - z)
