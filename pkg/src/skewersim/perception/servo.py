"""Coarse-to-fine visual servoing on fork/food keypoints.

Oracle mode reads the true tines midpoint and nearest food center straight
from the world (plus pixel noise); Learned mode decodes the argmaxes of a
trained two-channel heatmap model.  The loop halves the measured pixel offset
each step until it is within one pixel.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from ..errors import TargetLostError
from ..simworld import APPROACH_HEIGHT, ForkState, PlateState
from .pose import PoseEstimate
from .render import LOCAL_MPP, LOCAL_SIZE, LocalImage, render_local

SERVO_GAIN = 0.5
SERVO_NOISE_PX = 1.0
STOP_OFFSET_PX = 1.0
MAX_STEPS = 20
FOOD_PEAK_THRESHOLD = 0.2


class ServoMode(Enum):
    ORACLE = "oracle"
    LEARNED = "learned"


def _nearest_item_in_frame(local: LocalImage, plate: PlateState):
    half = LOCAL_SIZE / 2.0
    best, best_d = None, None
    for item in plate.items:
        row, col = local.world_to_px(item.center)
        if 0.0 <= row < LOCAL_SIZE and 0.0 <= col < LOCAL_SIZE:
            d = math.hypot(row - half, col - half)
            if best is None or d < best_d:
                best, best_d = item, d
    return best


def servo_offset(
    local: LocalImage,
    mode: ServoMode,
    model=None,
    plate: PlateState | None = None,
    rng: np.random.Generator | None = None,
    sigma_px: float = SERVO_NOISE_PX,
) -> tuple:
    """Return ((fork_row, fork_col), (food_row, food_col)) keypoints in pixels."""
    if mode is ServoMode.ORACLE:
        if plate is None:
            raise ValueError("oracle servoing needs the world state")
        item = _nearest_item_in_frame(local, plate)
        if item is None:
            raise TargetLostError("no food item in the local frame")
        fork_px = local.fork_px
        food_px = local.world_to_px(item.center)
        if sigma_px > 0.0 and rng is not None:
            noise = rng.normal(0.0, sigma_px, size=4)
            fork_px = (fork_px[0] + noise[0], fork_px[1] + noise[1])
            food_px = (food_px[0] + noise[2], food_px[1] + noise[3])
        return fork_px, food_px

    if model is None:
        raise ValueError("learned servoing needs a trained heatmap model")
    maps = model.predict(local.pixels[None])[0]          # (32, 32, 2)
    if float(maps[:, :, 1].max()) < FOOD_PEAK_THRESHOLD:
        raise TargetLostError("food heatmap peak below threshold")
    fork_idx = np.unravel_index(int(np.argmax(maps[:, :, 0])), maps.shape[:2])
    food_idx = np.unravel_index(int(np.argmax(maps[:, :, 1])), maps.shape[:2])
    return (float(fork_idx[0]), float(fork_idx[1])), (float(food_idx[0]), float(food_idx[1]))


def servo_loop(
    plate: PlateState,
    fork: ForkState,
    pose: PoseEstimate,
    mode: ServoMode,
    rng: np.random.Generator,
    model=None,
    max_steps: int = MAX_STEPS,
    gain: float = SERVO_GAIN,
    sigma_px: float = SERVO_NOISE_PX,
) -> tuple:
    """Iteratively align the tines with the food center before probing.

    Returns (fork_state, last_measured_offset_px).  The fork starts above the
    pose keypoint at approach height and moves by ``gain`` times the measured
    pixel offset each step; stops at <= 1 px or after ``max_steps``.
    """
    x, y = pose.keypoint[0], pose.keypoint[1]
    z = pose.keypoint[2] + APPROACH_HEIGHT
    offset_px = float("inf")
    for _ in range(max_steps):
        local = render_local(plate, (x, y), seed=int(rng.integers(2 ** 31)))
        fork_px, food_px = servo_offset(local, mode, model=model, plate=plate,
                                        rng=rng, sigma_px=sigma_px)
        d_row = food_px[0] - fork_px[0]
        d_col = food_px[1] - fork_px[1]
        offset_px = math.hypot(d_row, d_col)
        if offset_px <= STOP_OFFSET_PX:
            break
        x += gain * d_col * LOCAL_MPP
        y += gain * d_row * LOCAL_MPP
    state = ForkState(position=(x, y, z), pitch=0.0, roll=pose.roll)
    return state, offset_px
