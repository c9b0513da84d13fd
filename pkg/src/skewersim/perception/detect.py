"""Bounding-box detection with an explicit error model.

Stands in for a pretrained detector: true boxes are the axis-aligned hulls of
the item ellipses; boxes drop out with probability p_fn, spurious boxes
appear with probability p_fp per image, and surviving centers jitter by a
Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..simworld import FoodItem, PlateState
from .render import OverheadImage

P_FALSE_NEGATIVE = 0.05
P_FALSE_POSITIVE = 0.02
CENTER_JITTER_PX = 2.0


@dataclass(frozen=True)
class Detection:
    box: tuple                   # (cx, cy, w, h) in pixels
    is_false_positive: bool = False


def true_box(item: FoodItem, image: OverheadImage) -> tuple:
    """Axis-aligned hull of a rotated ellipse, in pixels."""
    a, b = item.major_axis, item.minor_axis
    c, s = math.cos(item.axis_angle), math.sin(item.axis_angle)
    ex = math.sqrt((a * c) ** 2 + (b * s) ** 2)
    ey = math.sqrt((a * s) ** 2 + (b * c) ** 2)
    row, col = image.world_to_px(item.center)
    return (col, row, 2.0 * ex / image.meters_per_pixel, 2.0 * ey / image.meters_per_pixel)


def _clamp_box(box: tuple, n: int) -> tuple:
    cx, cy, w, h = box
    w = min(w, n - 1.0)
    h = min(h, n - 1.0)
    cx = min(max(cx, w / 2.0), n - 1.0 - w / 2.0)
    cy = min(max(cy, h / 2.0), n - 1.0 - h / 2.0)
    return (cx, cy, w, h)


def detect_items(
    image: OverheadImage,
    plate: PlateState,
    rng: np.random.Generator,
    p_fn: float = P_FALSE_NEGATIVE,
    p_fp: float = P_FALSE_POSITIVE,
    jitter_px: float = CENTER_JITTER_PX,
) -> list:
    """Detections for one overhead frame, ground truth perturbed in place.

    With all noise zeroed this is the identity on the true boxes.
    """
    n = image.pixels.shape[0]
    detections = []
    for item in plate.items:
        if p_fn > 0.0 and rng.uniform() < p_fn:
            continue
        cx, cy, w, h = true_box(item, image)
        if jitter_px > 0.0:
            cx += rng.normal(0.0, jitter_px)
            cy += rng.normal(0.0, jitter_px)
        detections.append(Detection(box=_clamp_box((cx, cy, w, h), n)))
    if p_fp > 0.0 and rng.uniform() < p_fp:
        # spurious box somewhere on the plate
        r = math.sqrt(rng.uniform(0.0, 1.0)) * plate.plate_radius * 0.8
        theta = rng.uniform(0.0, 2.0 * math.pi)
        row, col = image.world_to_px((r * math.cos(theta), r * math.sin(theta)))
        w = rng.uniform(8.0, 14.0)
        h = rng.uniform(8.0, 14.0)
        detections.append(Detection(box=_clamp_box((col, row, w, h), n), is_false_positive=True))
    return detections
