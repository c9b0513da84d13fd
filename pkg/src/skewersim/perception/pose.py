"""Keypoint pose estimation inside a detection box.

The keypoint is the intensity-weighted centroid of non-plate pixels,
deprojected to world coordinates; the approach roll is perpendicular to the
principal axis of those pixels.  Height comes from the archetype table's
nominal item height since the synthetic world has no depth raster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NoItemError
from ..simworld import PLATE_Z
from .render import PLATE_GRAY, TABLE_GRAY, OverheadImage

NOMINAL_ITEM_HEIGHT = 0.020
BACKGROUND_DISTANCE = 0.10   # color distance below which a pixel reads as plate
CIRCULAR_TIEBREAK_EPS = 1e-3


@dataclass(frozen=True)
class PoseEstimate:
    keypoint: tuple      # (x, y, z) world meters
    roll: float          # gamma-hat in [0, pi)

    def __post_init__(self):
        if not (PLATE_Z <= self.keypoint[2] <= PLATE_Z + 0.06):
            raise ValueError("keypoint height outside the plate workspace")
        if not (0.0 <= self.roll < math.pi + 1e-12):
            raise ValueError("roll must lie in [0, pi)")


def item_mask(patch: np.ndarray) -> np.ndarray:
    """Non-plate pixels: color distance from both background grays."""
    d_plate = np.linalg.norm(patch - PLATE_GRAY, axis=-1)
    d_table = np.linalg.norm(patch - TABLE_GRAY, axis=-1)
    return (d_plate > BACKGROUND_DISTANCE) & (d_table > BACKGROUND_DISTANCE)


def estimate_pose(
    image: OverheadImage,
    box: tuple,
    nominal_height: float = NOMINAL_ITEM_HEIGHT,
) -> PoseEstimate:
    """Refine a detection box to an item keypoint and an approach roll."""
    n = image.pixels.shape[0]
    cx, cy, w, h = box
    r0 = max(0, int(math.floor(cy - h / 2.0)))
    r1 = min(n, int(math.ceil(cy + h / 2.0)) + 1)
    c0 = max(0, int(math.floor(cx - w / 2.0)))
    c1 = min(n, int(math.ceil(cx + w / 2.0)) + 1)
    patch = image.pixels[r0:r1, c0:c1]
    mask = item_mask(patch)
    if not mask.any():
        raise NoItemError("detection box contains no non-plate pixels")

    rows, cols = np.nonzero(mask)
    weights = patch[rows, cols].mean(axis=-1)  # brightness
    wsum = weights.sum()
    row_c = float((rows * weights).sum() / wsum) + r0
    col_c = float((cols * weights).sum() / wsum) + c0
    x, y = image.px_to_world((row_c, col_c))

    # principal axis of the mask via unweighted second moments
    dr = rows - (row_c - r0)
    dc = cols - (col_c - c0)
    mu_rr = float((dr * dr).mean())
    mu_cc = float((dc * dc).mean())
    mu_rc = float((dr * dc).mean())
    anisotropy = math.hypot(mu_cc - mu_rr, 2.0 * mu_rc)
    if anisotropy < CIRCULAR_TIEBREAK_EPS * max(mu_rr + mu_cc, 1e-12):
        axis_angle = -math.pi / 2.0  # circular blob: declared tie-break gives roll 0
    else:
        # angle of the major axis in world terms (col ~ x, row ~ y)
        axis_angle = 0.5 * math.atan2(2.0 * mu_rc, mu_cc - mu_rr)
    roll = (axis_angle + math.pi / 2.0) % math.pi
    return PoseEstimate(keypoint=(x, y, PLATE_Z + nominal_height), roll=roll)
