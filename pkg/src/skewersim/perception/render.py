"""Synthetic overhead and eye-in-hand rendering.

Items are filled rotated ellipses colored in HSV with per-pixel hue noise and
a dome-shaped brightness highlight peaking at the item center (overhead
lighting on a convex bite).  Pixels are quantized to 8 bits like a real
camera, which also keeps serialized datasets compact and byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..simworld import PlateState

OVERHEAD_SIZE = 128
OVERHEAD_MPP = 0.0021      # meters per pixel, 128 px cover 0.269 m
LOCAL_SIZE = 32
LOCAL_MPP = 0.0008         # 32 px cover 25.6 mm
HUE_NOISE_STD = 0.02
PLATE_GRAY = 0.62
TABLE_GRAY = 0.25
SHADING_FLOOR = 0.55       # rim brightness relative to the center highlight


def hsv_to_rgb(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    h = np.mod(h, 1.0)
    i = np.floor(h * 6.0).astype(int) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - f * s)
    t = v * (1.0 - (1.0 - f) * s)
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def rgb_to_hsv(rgb: np.ndarray) -> tuple:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = np.max(rgb, axis=-1)
    c = v - np.min(rgb, axis=-1)
    s = np.where(v > 0, c / np.maximum(v, 1e-12), 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        h = np.select(
            [c == 0, v == r, v == g],
            [0.0,
             ((g - b) / np.maximum(c, 1e-12)) / 6.0,
             ((b - r) / np.maximum(c, 1e-12) + 2.0) / 6.0],
            ((r - g) / np.maximum(c, 1e-12) + 4.0) / 6.0,
        )
    return np.mod(h, 1.0), s, v


def quantize(pixels: np.ndarray) -> np.ndarray:
    return (np.round(np.clip(pixels, 0.0, 1.0) * 255.0) / 255.0).astype(np.float32)


@dataclass(frozen=True)
class OverheadImage:
    pixels: np.ndarray          # (128, 128, 3) in [0, 1]
    meters_per_pixel: float = OVERHEAD_MPP

    def world_to_px(self, point: tuple) -> tuple:
        n = self.pixels.shape[0]
        row = n / 2.0 + point[1] / self.meters_per_pixel
        col = n / 2.0 + point[0] / self.meters_per_pixel
        return (row, col)

    def px_to_world(self, px: tuple) -> tuple:
        n = self.pixels.shape[0]
        x = (px[1] - n / 2.0) * self.meters_per_pixel
        y = (px[0] - n / 2.0) * self.meters_per_pixel
        return (x, y)


@dataclass(frozen=True)
class LocalImage:
    pixels: np.ndarray          # (32, 32, 3) in [0, 1]
    camera_center: tuple        # world (x, y) of the image center
    meters_per_pixel: float = LOCAL_MPP
    fork_px: tuple = (LOCAL_SIZE / 2.0, LOCAL_SIZE / 2.0)  # true tines midpoint

    def world_to_px(self, point: tuple) -> tuple:
        n = self.pixels.shape[0]
        row = n / 2.0 + (point[1] - self.camera_center[1]) / self.meters_per_pixel
        col = n / 2.0 + (point[0] - self.camera_center[0]) / self.meters_per_pixel
        return (row, col)

    def px_to_world(self, px: tuple) -> tuple:
        n = self.pixels.shape[0]
        x = self.camera_center[0] + (px[1] - n / 2.0) * self.meters_per_pixel
        y = self.camera_center[1] + (px[0] - n / 2.0) * self.meters_per_pixel
        return (x, y)


def _paint_items(pixels, plate, origin, mpp, rng):
    """Draw every item whose footprint intersects the frame, in id order."""
    n = pixels.shape[0]
    rows = (np.arange(n) - n / 2.0) * mpp + origin[1]
    cols = (np.arange(n) - n / 2.0) * mpp + origin[0]
    yy, xx = np.meshgrid(rows, cols, indexing="ij")
    for item in plate.items:
        dx = xx - item.center[0]
        dy = yy - item.center[1]
        c, s = np.cos(item.axis_angle), np.sin(item.axis_angle)
        u = c * dx + s * dy
        v = -s * dx + c * dy
        rho2 = (u / item.major_axis) ** 2 + (v / item.minor_axis) ** 2
        mask = rho2 <= 1.0
        if not mask.any():
            continue
        rho2_in = rho2[mask]
        hue = item.appearance.base_hue + rng.normal(0.0, HUE_NOISE_STD, size=rho2_in.shape)
        sat = np.full_like(rho2_in, item.appearance.saturation)
        value = SHADING_FLOOR + (1.0 - SHADING_FLOOR) * np.exp(-rho2_in / (2.0 * (1.0 / 3.0) ** 2))
        pixels[mask] = hsv_to_rgb(hue, sat, value)


def render_overhead(plate: PlateState, seed: int = 0) -> OverheadImage:
    """Top-down plate view: gray disk, one filled ellipse per item."""
    rng = np.random.default_rng(seed)
    n = OVERHEAD_SIZE
    pixels = np.full((n, n, 3), TABLE_GRAY, dtype=np.float64)
    rr = (np.arange(n) - n / 2.0) * OVERHEAD_MPP
    yy, xx = np.meshgrid(rr, rr, indexing="ij")
    plate_mask = xx ** 2 + yy ** 2 <= plate.plate_radius ** 2
    pixels[plate_mask] = PLATE_GRAY
    _paint_items(pixels, plate, (0.0, 0.0), OVERHEAD_MPP, rng)
    return OverheadImage(pixels=quantize(pixels))


# 2-px-thick V pointing down; (0, 0) is the tip, the tines-midpoint keypoint.
# The fork floats above the scene, so it casts a short shadow under the tip,
# which keeps the tip pattern high-contrast even over bright items.
CHEVRON_OFFSETS = ((-2, -2), (-2, 2), (-1, -2), (-1, -1), (-1, 1), (-1, 2), (0, 0))
CHEVRON_SHADOW_OFFSETS = ((1, -1), (1, 0), (1, 1))
CHEVRON_SHADOW_VALUE = 0.12


def render_local(
    plate: PlateState,
    camera_center: tuple,
    seed: int = 0,
    mount_offset_px: tuple = (0.0, 0.0),
) -> LocalImage:
    """Eye-in-hand view centered on the fork; the tines are always visible.

    ``mount_offset_px`` shifts the rendered chevron off the image center,
    modeling a fork that sits slightly displaced in its mount.
    """
    rng = np.random.default_rng(seed)
    n = LOCAL_SIZE
    pixels = np.full((n, n, 3), TABLE_GRAY, dtype=np.float64)
    rr = (np.arange(n) - n / 2.0) * LOCAL_MPP
    yy, xx = np.meshgrid(rr + camera_center[1], rr + camera_center[0], indexing="ij")
    plate_mask = xx ** 2 + yy ** 2 <= plate.plate_radius ** 2
    pixels[plate_mask] = PLATE_GRAY
    _paint_items(pixels, plate, camera_center, LOCAL_MPP, rng)

    tip_row = round(n / 2.0 + mount_offset_px[0])
    tip_col = round(n / 2.0 + mount_offset_px[1])
    for dr, dc in CHEVRON_SHADOW_OFFSETS:
        r, c = tip_row + dr, tip_col + dc
        if 0 <= r < n and 0 <= c < n:
            pixels[r, c] = CHEVRON_SHADOW_VALUE
    for dr, dc in CHEVRON_OFFSETS:
        r, c = tip_row + dr, tip_col + dc
        if 0 <= r < n and 0 <= c < n:
            pixels[r, c] = 1.0
    return LocalImage(
        pixels=quantize(pixels),
        camera_center=camera_center,
        fork_px=(float(tip_row), float(tip_col)),
    )


def write_ppm(pixels: np.ndarray, path) -> None:
    """Binary P6 image dump for eyeballing renders."""
    arr = np.round(np.clip(pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
    h, w = arr.shape[:2]
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode())
        f.write(arr.tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic != b"P6":
            raise ValueError("not a binary PPM file")
        dims = f.readline().split()
        w, h = int(dims[0]), int(dims[1])
        maxval = int(f.readline())
        data = np.frombuffer(f.read(w * h * 3), dtype=np.uint8)
    return (data.reshape(h, w, 3) / maxval).astype(np.float32)
