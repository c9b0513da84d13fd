"""Dataset augmentation: image affine/colorspace and haptic time warps."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..perception import hsv_to_rgb, rgb_to_hsv, shift_image
from ..simworld import TRACE_LEN
from .dataset import Example


@dataclass(frozen=True)
class AugmentationConfig:
    flip_prob: float = 0.5
    rotation_deg: float = 12.0
    translate_px: int = 2
    hue_sigma: float = 0.03
    time_scale: tuple = (0.9, 1.1)
    shift_samples: int = 2
    copies: int = 8

    def __post_init__(self):
        lo, hi = self.time_scale
        if not (0.0 < lo <= hi < 2.0):
            raise ValueError("time_scale range must lie inside (0, 2)")
        if self.copies < 1:
            raise ValueError("copies must be >= 1")


def rotate_image(img: np.ndarray, degrees: float) -> np.ndarray:
    """Nearest-neighbor rotation about the image center, edge-clamped."""
    if degrees == 0.0:
        return img
    n = img.shape[0]
    theta = math.radians(degrees)
    c, s = math.cos(theta), math.sin(theta)
    center = (n - 1) / 2.0
    rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    dr = rows - center
    dc = cols - center
    src_r = np.clip(np.round(center + c * dr + s * dc).astype(int), 0, n - 1)
    src_c = np.clip(np.round(center - s * dr + c * dc).astype(int), 0, n - 1)
    return img[src_r, src_c]


def jitter_hue(img: np.ndarray, dh: float) -> np.ndarray:
    h, s, v = rgb_to_hsv(img)
    return hsv_to_rgb(h + dh, s, v).astype(np.float32)


def warp_trace(trace: np.ndarray, scale: float, shift: int) -> np.ndarray:
    """Temporal scaling and shifting, resampled back to 26 samples."""
    n = len(trace)
    grid = np.arange(n, dtype=np.float64)
    if scale != 1.0:
        trace = np.interp(grid * scale, grid, trace)
    if shift != 0:
        trace = np.roll(trace, shift)
        if shift > 0:
            trace[:shift] = trace[shift]
        else:
            trace[shift:] = trace[shift - 1]
    return trace.astype(np.float32)


def augment(example: Example, config: AugmentationConfig, rng: np.random.Generator) -> list:
    """Produce ``config.copies`` label-preserving variants of one example."""
    out = []
    for _ in range(config.copies):
        image = example.image
        crop = example.overhead_crop
        if config.flip_prob > 0.0 and rng.uniform() < config.flip_prob:
            image = image[:, ::-1].copy()
            crop = crop[:, ::-1].copy()
        if config.rotation_deg > 0.0:
            deg = rng.uniform(-config.rotation_deg, config.rotation_deg)
            image = rotate_image(image, deg)
            crop = rotate_image(crop, deg)
        if config.translate_px > 0:
            dr = int(rng.integers(-config.translate_px, config.translate_px + 1))
            dc = int(rng.integers(-config.translate_px, config.translate_px + 1))
            image = shift_image(image, dr, dc)
            crop = shift_image(crop, dr, dc)
        if config.hue_sigma > 0.0:
            dh = rng.normal(0.0, config.hue_sigma)
            image = jitter_hue(image, dh)
            crop = jitter_hue(crop, dh)

        scale = rng.uniform(*config.time_scale) if config.time_scale != (1.0, 1.0) else 1.0
        shift = int(rng.integers(-config.shift_samples, config.shift_samples + 1)) \
            if config.shift_samples > 0 else 0
        trace = warp_trace(example.trace, scale, shift)
        assert len(trace) == TRACE_LEN
        out.append(replace(example, image=image, overhead_crop=crop, trace=trace))
    return out


def augment_set(examples: list, config: AugmentationConfig, rng: np.random.Generator) -> list:
    out = []
    for ex in examples:
        out.extend(augment(ex, config, rng))
    return out
