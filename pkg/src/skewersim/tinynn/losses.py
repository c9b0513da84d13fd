"""Losses: softmax cross-entropy and per-pixel binary cross-entropy."""

from __future__ import annotations

import numpy as np

EPS = 1e-12


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean softmax cross-entropy; numerically stabilized by max-subtraction."""
    logits = np.atleast_2d(logits)
    labels = np.atleast_1d(labels)
    z = logits - logits.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=-1))
    picked = z[np.arange(len(labels)), labels]
    return float(np.mean(log_norm - picked))


def cross_entropy_grad(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """d(mean loss)/d(logits) = (softmax - onehot) / N."""
    logits = np.atleast_2d(logits)
    labels = np.atleast_1d(labels)
    p = softmax(logits)
    p[np.arange(len(labels)), labels] -= 1.0
    return p / len(labels)


def bce(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean per-element binary cross-entropy with clamped logarithms."""
    p = np.clip(pred, EPS, 1.0 - EPS)
    return float(np.mean(-target * np.log(p) - (1.0 - target) * np.log(1.0 - p)))


def bce_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """d(mean loss)/d(pred); composes with a sigmoid layer to (p - t) / N."""
    p = np.clip(pred, EPS, 1.0 - EPS)
    return (p - target) / (p * (1.0 - p)) / pred.size
