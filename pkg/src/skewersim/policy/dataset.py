"""Probe-interaction dataset: paired post-contact images and haptic windows.

Each example comes from a scripted single-item scene: render the plate
overhead, box the item, refine its pose, servo the fork over it, probe, and
record the post-contact eye-in-hand image, the 26-sample force window and the
compliance-derived primitive label.  Labels need no skewering: the hidden
material class is the annotator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..perception import (
    ServoMode,
    estimate_pose,
    render_local,
    render_overhead,
    servo_loop,
    true_box,
)
from ..simworld import (
    DEFAULT_ARCHETYPES,
    ComplianceClass,
    ForkState,
    PlateSpec,
    Primitive,
    execute_primitive,
    probe_action,
    spawn_plate,
)

LABEL_VERTICAL = 0
LABEL_ANGLED = 1
LABEL_NAMES = {LABEL_VERTICAL: "vertical_skewer", LABEL_ANGLED: "angled_skewer"}
CROP_SIZE = 32

# per-archetype sampling weights for dataset scenes
DATASET_MIX = {
    "raw_squash": 20,
    "boiled_squash": 20,
    "carrot": 8,
    "broccoli": 11,
    "cheddar": 6,
    "banana_slice": 10,
    "kiwi": 8,
    "tofu": 7,
}
TEST_FRACTION = 0.2


@dataclass(frozen=True)
class Example:
    image: np.ndarray          # (32, 32, 3) post-contact local view
    overhead_crop: np.ndarray  # (32, 32, 3) pre-contact overhead crop
    trace: np.ndarray          # (26,) force magnitudes
    label: int
    archetype: str
    tags: tuple = ()


def label_for(compliance: ComplianceClass) -> int:
    return LABEL_VERTICAL if compliance is ComplianceClass.HARD else LABEL_ANGLED


def _allocate(weights: dict, total: int) -> dict:
    """Largest-remainder apportionment of ``total`` scenes to archetypes."""
    wsum = sum(weights.values())
    raw = {k: total * w / wsum for k, w in weights.items()}
    counts = {k: int(v) for k, v in raw.items()}
    short = total - sum(counts.values())
    for k in sorted(raw, key=lambda k: raw[k] - counts[k], reverse=True)[:short]:
        counts[k] += 1
    return counts


def overhead_crop(image, center_px: tuple, size: int = CROP_SIZE) -> np.ndarray:
    n = image.pixels.shape[0]
    r = int(round(center_px[0])) - size // 2
    c = int(round(center_px[1])) - size // 2
    r = min(max(r, 0), n - size)
    c = min(max(c, 0), n - size)
    return image.pixels[r:r + size, c:c + size].copy()


def record_example(plate, item, rng, table=None, force_noise_std=0.05,
                   servo_sigma_px=1.0) -> Example:
    """Run the servo-then-probe script on one item and package the readings."""
    overhead = render_overhead(plate, seed=int(rng.integers(2 ** 31)))
    box = true_box(item, overhead)
    pose = estimate_pose(overhead, box)
    crop = overhead_crop(overhead, overhead.world_to_px(item.center))
    fork, _ = servo_loop(plate, ForkState(), pose, ServoMode.ORACLE, rng,
                         sigma_px=servo_sigma_px)
    x, y, z = fork.position
    res = execute_primitive(plate, fork, probe_action(x, y, z, fork.roll), rng,
                            force_noise_std=force_noise_std)
    if res.trace is None:
        raise RuntimeError("probe failed to reach contact in a scripted scene")
    post = render_local(plate, (x, y), seed=int(rng.integers(2 ** 31)))
    entry = (table or DEFAULT_ARCHETYPES)[item.archetype]
    return Example(
        image=post.pixels,
        overhead_crop=crop,
        trace=res.trace.samples.astype(np.float32),
        label=label_for(item.material.compliance_class),
        archetype=item.archetype,
        tags=tuple(entry.get("tags", ())),
    )


def generate_dataset(
    table: dict | None = None,
    n_base: int = 300,
    seed: int = 0,
    mix: dict | None = None,
) -> tuple:
    """Build (train, test) example lists; deterministic per seed.

    ``n_base`` scenes train the policy; a stratified extra fifth forms the
    disjoint held-out set (60 examples at the default size).
    """
    table = table or DEFAULT_ARCHETYPES
    mix = dict(mix or DATASET_MIX)
    mix = {k: v for k, v in mix.items() if k in table}
    classes = {table[name]["class"] for name in mix}
    if classes != {"hard", "soft"}:
        raise ConfigError("archetype mix must include both compliance classes")

    n_test = max(2, round(n_base * TEST_FRACTION))
    counts = _allocate(mix, n_base + n_test)
    test_counts = _allocate({k: counts[k] for k in counts}, n_test)

    rng = np.random.default_rng(seed)
    train, test = [], []
    for name in sorted(counts):
        for i in range(counts[name]):
            plate = spawn_plate(PlateSpec(archetypes=((name, 1),), plate_radius=0.05),
                                seed=int(rng.integers(2 ** 31)), table=table)
            ex = record_example(plate, plate.items[0], rng, table=table)
            (test if i < test_counts[name] else train).append(ex)
    order = rng.permutation(len(train))
    train = [train[i] for i in order]
    return train, test


def example_to_json(ex: Example) -> dict:
    return {
        "image": np.round(ex.image * 255).astype(int).tolist(),
        "overhead": np.round(ex.overhead_crop * 255).astype(int).tolist(),
        "trace": [round(float(v), 6) for v in ex.trace],
        "label": LABEL_NAMES[ex.label],
        "archetype": ex.archetype,
        "tags": list(ex.tags),
    }


def example_from_json(obj: dict) -> Example:
    names = {v: k for k, v in LABEL_NAMES.items()}
    return Example(
        image=(np.asarray(obj["image"], dtype=np.float32) / 255.0),
        overhead_crop=(np.asarray(obj["overhead"], dtype=np.float32) / 255.0),
        trace=np.asarray(obj["trace"], dtype=np.float32),
        label=names[obj["label"]],
        archetype=obj["archetype"],
        tags=tuple(obj["tags"]),
    )


def write_examples_jsonl(path, examples: list) -> None:
    with open(path, "w") as f:
        for ex in examples:
            f.write(json.dumps(example_to_json(ex), sort_keys=True) + "\n")


def read_examples_jsonl(path) -> list:
    out = []
    with open(path) as f:
        for line in f:
            if line.strip():
                out.append(example_from_json(json.loads(line)))
    return out
