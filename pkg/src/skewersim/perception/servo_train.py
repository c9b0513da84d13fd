"""Heatmap-keypoint model for servoing, its dataset builder and training.

A fully-convolutional two-stage net maps the 32x32 eye-in-hand image to two
same-resolution sigmoid heatmaps (fork channel, food channel) trained with
per-pixel binary cross-entropy against sigma = 1.5 px Gaussian targets.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..simworld import PlateSpec, spawn_plate
from ..tinynn import Adam, Conv3x3, Sequential, Sigmoid, Tanh, bce, bce_grad
from .render import LOCAL_MPP, LOCAL_SIZE, hsv_to_rgb, render_local, rgb_to_hsv

HEATMAP_SIGMA_PX = 1.5
BASE_EXAMPLES = 200
AUGMENTED_EXAMPLES = 3500
TRAIN_EPOCHS = 16
BATCH_SIZE = 32
LEARNING_RATE = 2e-3


class HeatmapModel:
    """Two conv stages, 8 hidden channels, same-resolution sigmoid output."""

    KIND = "servo_heatmap"

    def __init__(self, seed: int = 0, dtype=np.float32):
        rng = np.random.default_rng(seed)
        self.seed = seed
        self.net = Sequential([
            Conv3x3(3, 8, rng, stride=1, dtype=dtype),
            Tanh(),
            Conv3x3(8, 2, rng, stride=1, dtype=dtype),
            Sigmoid(),
        ])

    def predict(self, images: np.ndarray) -> np.ndarray:
        return self.net.forward(np.asarray(images, dtype=self.dtype))

    @property
    def dtype(self):
        return self.net.layers[0].params["W"].dtype

    def parameters(self):
        return self.net.named_params("servo")

    def zero_grads(self):
        self.net.zero_grads()

    def astype(self, dtype):
        self.net.astype(dtype)
        return self

    def loss(self, sample) -> float:
        images, targets = sample
        pred = self.net.forward(np.asarray(images, dtype=self.dtype))
        return bce(pred, np.asarray(targets, dtype=self.dtype))

    def loss_and_grad(self, sample) -> float:
        images, targets = sample
        targets = np.asarray(targets, dtype=self.dtype)
        pred = self.net.forward(np.asarray(images, dtype=self.dtype))
        self.net.backward(bce_grad(pred, targets).astype(self.dtype))
        return bce(pred, targets)


def gaussian_heatmap(center: tuple, size: int = LOCAL_SIZE,
                     sigma: float = HEATMAP_SIGMA_PX) -> np.ndarray:
    rows = np.arange(size)[:, None]
    cols = np.arange(size)[None, :]
    d2 = (rows - center[0]) ** 2 + (cols - center[1]) ** 2
    return np.exp(-d2 / (2.0 * sigma ** 2))


def target_maps(fork_px: tuple, food_px: tuple) -> np.ndarray:
    return np.stack([gaussian_heatmap(fork_px), gaussian_heatmap(food_px)], axis=-1)


ARCHETYPE_CYCLE = ("raw_squash", "boiled_squash", "carrot", "broccoli",
                   "cheddar", "banana_slice", "kiwi", "tofu")


def build_servo_dataset(
    n_base: int = BASE_EXAMPLES,
    total: int = AUGMENTED_EXAMPLES,
    seed: int = 0,
    table: dict | None = None,
) -> list:
    """List of (image, fork_px, food_px): n_base renders grown to ``total``.

    Base scenes vary the archetype, the food offset in frame and the fork
    mount offset; augmentation adds flips, integer shifts and hue jitter.
    """
    rng = np.random.default_rng(seed)
    base = []
    for i in range(n_base):
        name = ARCHETYPE_CYCLE[i % len(ARCHETYPE_CYCLE)]
        plate = spawn_plate(PlateSpec(archetypes=((name, 1),)),
                            seed=int(rng.integers(2 ** 31)), table=table)
        item = plate.items[0]
        off_r = rng.uniform(-7.0, 7.0)
        off_c = rng.uniform(-7.0, 7.0)
        camera = (item.center[0] - off_c * LOCAL_MPP, item.center[1] - off_r * LOCAL_MPP)
        mount = (float(rng.integers(-3, 4)), float(rng.integers(-3, 4)))
        local = render_local(plate, camera, seed=int(rng.integers(2 ** 31)),
                             mount_offset_px=mount)
        food_px = local.world_to_px(item.center)
        base.append((local.pixels, local.fork_px, food_px))

    out = list(base)
    i = 0
    while len(out) < total:
        img, fork_px, food_px = base[i % len(base)]
        out.append(_augment_servo_example(img, fork_px, food_px, rng))
        i += 1
    return out[:total]


def _augment_servo_example(img, fork_px, food_px, rng):
    n = img.shape[0]
    img = img.copy()
    fr, fc = fork_px
    gr, gc = food_px
    if rng.uniform() < 0.5:  # horizontal flip
        img = img[:, ::-1]
        fc, gc = n - 1 - fc, n - 1 - gc
    if rng.uniform() < 0.5:  # vertical flip
        img = img[::-1, :]
        fr, gr = n - 1 - fr, n - 1 - gr
    sr = int(rng.integers(-3, 4))
    sc = int(rng.integers(-3, 4))
    img = shift_image(img, sr, sc)
    fr, fc = fr + sr, fc + sc
    gr, gc = gr + sr, gc + sc
    dh = rng.normal(0.0, 0.03)
    h, s, v = rgb_to_hsv(img)
    img = hsv_to_rgb(h + dh, s, v).astype(np.float32)
    clamp = lambda p: (min(max(p[0], 0.0), n - 1.0), min(max(p[1], 0.0), n - 1.0))
    return img, clamp((fr, fc)), clamp((gr, gc))


def shift_image(img: np.ndarray, d_row: int, d_col: int) -> np.ndarray:
    """Integer translation with edge padding."""
    n = img.shape[0]
    pad = max(abs(d_row), abs(d_col))
    if pad == 0:
        return img
    padded = np.pad(img, ((pad, pad), (pad, pad), (0, 0)), mode="edge")
    r0 = pad - d_row
    c0 = pad - d_col
    return padded[r0:r0 + n, c0:c0 + n]


def train_servo_model(dataset: list, config: dict | None = None, seed: int = 0):
    """Train the heatmap model; returns (model, final_loss, per-epoch log)."""
    if not dataset:
        raise ConfigError("servo training needs a non-empty dataset")
    cfg = {"epochs": TRAIN_EPOCHS, "batch_size": BATCH_SIZE, "lr": LEARNING_RATE}
    cfg.update(config or {})

    images = np.stack([ex[0] for ex in dataset]).astype(np.float32)
    targets = np.stack([target_maps(ex[1], ex[2]) for ex in dataset]).astype(np.float32)

    model = HeatmapModel(seed=seed)
    opt = Adam(model.parameters(), lr=cfg["lr"])
    rng = np.random.default_rng(seed + 1)
    n = len(dataset)
    log = []
    final_loss = None
    for epoch in range(cfg["epochs"]):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg["batch_size"]):
            idx = order[start:start + cfg["batch_size"]]
            model.zero_grads()
            loss = model.loss_and_grad((images[idx], targets[idx]))
            opt.step()
            epoch_loss += loss * len(idx)
        final_loss = epoch_loss / n
        log.append({"epoch": epoch, "loss": final_loss})
    return model, final_loss, log


def decode_keypoints(maps: np.ndarray) -> tuple:
    fork = np.unravel_index(int(np.argmax(maps[:, :, 0])), maps.shape[:2])
    food = np.unravel_index(int(np.argmax(maps[:, :, 1])), maps.shape[:2])
    return (float(fork[0]), float(fork[1])), (float(food[0]), float(food[1]))


def keypoint_error(model: HeatmapModel, dataset: list, batch: int = 256) -> float:
    """Mean Euclidean pixel error over fork and food keypoints."""
    errs = []
    for start in range(0, len(dataset), batch):
        chunk = dataset[start:start + batch]
        maps = model.predict(np.stack([ex[0] for ex in chunk]))
        for m, (_, fork_px, food_px) in zip(maps, chunk):
            pf, pg = decode_keypoints(m)
            errs.append(np.hypot(pf[0] - fork_px[0], pf[1] - fork_px[1]))
            errs.append(np.hypot(pg[0] - food_px[0], pg[1] - food_px[1]))
    return float(np.mean(errs))
