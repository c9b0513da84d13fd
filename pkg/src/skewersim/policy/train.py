"""Policy training, evaluation helpers, embedding export, sample-efficiency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..tinynn import Adam
from .augment import AugmentationConfig, augment_set
from .dataset import LABEL_ANGLED, LABEL_VERTICAL, Example
from .model import MODE_OPENLOOP, MODES, PolicyModel

DEFAULT_EPOCHS = 30
DEFAULT_BATCH = 32
DEFAULT_LR = 1.5e-3


def arrays_for(mode: str, examples: list) -> tuple:
    """(images, traces, labels) arrays for one mode's training inputs."""
    source = (lambda ex: ex.overhead_crop) if mode == MODE_OPENLOOP else (lambda ex: ex.image)
    images = np.stack([source(ex) for ex in examples]).astype(np.float32)
    traces = np.stack([ex.trace for ex in examples]).astype(np.float32)
    labels = np.array([ex.label for ex in examples], dtype=np.int64)
    return images, traces, labels


@dataclass
class TrainedPolicy:
    model: PolicyModel
    log: list
    config: dict


def train_policy(
    train_set: list,
    mode: str = "multimodal",
    config: dict | None = None,
    seed: int = 0,
) -> TrainedPolicy:
    """Minimize softmax cross-entropy over the (augmented) training set."""
    if not train_set:
        raise ConfigError("training needs a non-empty example set")
    if mode not in MODES:
        raise ConfigError(f"unknown policy mode {mode!r}")
    cfg = {"epochs": DEFAULT_EPOCHS, "batch_size": DEFAULT_BATCH, "lr": DEFAULT_LR,
           "augment": True, "copies": 8}
    cfg.update(config or {})

    rng = np.random.default_rng(seed)
    examples = train_set
    if cfg["augment"]:
        examples = augment_set(train_set, AugmentationConfig(copies=cfg["copies"]), rng)
    images, traces, labels = arrays_for(mode, examples)

    model = PolicyModel(mode=mode, seed=seed)
    opt = Adam(model.parameters(), lr=cfg["lr"])
    n = len(examples)
    log = []
    for epoch in range(cfg["epochs"]):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg["batch_size"]):
            idx = order[start:start + cfg["batch_size"]]
            model.zero_grads()
            loss = model.loss_and_grad((images[idx], traces[idx], labels[idx]))
            opt.step()
            epoch_loss += loss * len(idx)
        log.append({"epoch": epoch, "loss": epoch_loss / n})
    return TrainedPolicy(model=model, log=log, config=cfg)


def predict_labels(model: PolicyModel, examples: list, batch: int = 256) -> np.ndarray:
    """Argmax labels with the angled-skewer tie-break applied batch-wise."""
    out = np.empty(len(examples), dtype=np.int64)
    for start in range(0, len(examples), batch):
        chunk = examples[start:start + batch]
        images, traces, _ = arrays_for(model.mode, chunk)
        probs = model.predict_proba(images if model.uses_vision else None,
                                    traces if model.uses_haptic else None)
        out[start:start + len(chunk)] = np.where(probs[:, 1] >= probs[:, 0],
                                                 LABEL_ANGLED, LABEL_VERTICAL)
    return out


def accuracy(model: PolicyModel, examples: list) -> float:
    pred = predict_labels(model, examples)
    truth = np.array([ex.label for ex in examples])
    return float((pred == truth).mean())


def subset_accuracy(model: PolicyModel, examples: list, tags: set) -> float:
    subset = [ex for ex in examples if set(ex.tags) & tags]
    if not subset:
        raise ConfigError("no examples carry the requested tags")
    return accuracy(model, subset)


def export_embeddings(model: PolicyModel, examples: list) -> list:
    """One row per example: 48 embedding values plus label and archetype."""
    if model.mode != "multimodal":
        raise ConfigError("embedding export requires a multimodal model")
    rows = []
    for start in range(0, len(examples), 256):
        chunk = examples[start:start + 256]
        images, traces, _ = arrays_for(model.mode, chunk)
        emb = model.embed(images, traces)
        for ex, e in zip(chunk, emb):
            rows.append({"embedding": [float(v) for v in e],
                         "label": ex.label, "archetype": ex.archetype})
    return rows


def sample_efficiency_sweep(
    train_set: list,
    test_set: list,
    fractions: tuple = (0.10, 0.25, 0.50, 0.75, 1.00),
    seeds: tuple = (0, 1, 2),
    mode: str = "multimodal",
    config: dict | None = None,
) -> list:
    """Accuracy table over training-set fractions, subsampled pre-augmentation."""
    if any(f <= 0.0 or f > 1.0 for f in fractions):
        raise ConfigError("fractions must lie in (0, 1]")
    truth = np.array([ex.label for ex in test_set])
    rows = []
    for fraction in fractions:
        for seed in seeds:
            rng = np.random.default_rng(seed * 7919 + int(fraction * 1000))
            n_sub = max(2, round(len(train_set) * fraction))
            idx = rng.choice(len(train_set), size=n_sub, replace=False)
            subset = [train_set[i] for i in idx]
            if len({ex.label for ex in subset}) < 2:  # degenerate draw
                others = [i for i in range(len(train_set)) if i not in set(idx)]
                subset[0] = train_set[others[0]]
            trained = train_policy(subset, mode=mode, config=config, seed=seed)
            pred = predict_labels(trained.model, test_set)
            vert = truth == LABEL_VERTICAL
            rows.append({
                "fraction": fraction,
                "seed": seed,
                "overall_acc": float((pred == truth).mean()),
                "vertical_acc": float((pred[vert] == truth[vert]).mean()),
                "angled_acc": float((pred[~vert] == truth[~vert]).mean()),
            })
    return rows
