"""Primitive-selection network and its single-modality variants.

One architecture serves every mode: a small conv encoder producing a 32-d
visual embedding, a gated-recurrent haptic encoder producing a 16-d
embedding, and a linear head with softmax over the two skewer primitives.
Single-modality modes zero the other branch's embedding, so checkpoints are
interchangeable across modes.
"""

from __future__ import annotations

import numpy as np

from ..errors import CheckpointError, ConfigError
from ..simworld import Primitive, TRACE_LEN
from ..tinynn import (
    Conv3x3,
    Dense,
    Flatten,
    GatedRecurrentCell,
    Sequential,
    Tanh,
    cross_entropy,
    cross_entropy_grad,
    load_checkpoint,
    restore_params,
    save_checkpoint,
    softmax,
)

MODE_MULTIMODAL = "multimodal"
MODE_VISION = "vision"
MODE_HAPTIC = "haptic"
MODE_OPENLOOP = "openloop"
MODES = (MODE_MULTIMODAL, MODE_VISION, MODE_HAPTIC, MODE_OPENLOOP)

VISUAL_DIM = 32
HAPTIC_DIM = 16
EMBED_DIM = VISUAL_DIM + HAPTIC_DIM
TRACE_SCALE = 0.5  # newtons to roughly unit scale for the recurrent encoder


class PolicyModel:
    KIND = "policy"

    def __init__(self, mode: str = MODE_MULTIMODAL, seed: int = 0, dtype=np.float32):
        if mode not in MODES:
            raise ConfigError(f"unknown policy mode {mode!r}")
        rng = np.random.default_rng(seed)
        self.mode = mode
        self.seed = seed
        self.visual = Sequential([
            Conv3x3(3, 8, rng, stride=2, dtype=dtype),
            Tanh(),
            Conv3x3(8, 8, rng, stride=2, dtype=dtype),
            Tanh(),
            Flatten(),
            Dense(8 * 8 * 8, VISUAL_DIM, rng, dtype=dtype),
            Tanh(),
        ])
        self.haptic = GatedRecurrentCell(1, HAPTIC_DIM, rng, dtype=dtype)
        self.head = Dense(EMBED_DIM, 2, rng, dtype=dtype)

    @property
    def uses_vision(self) -> bool:
        return self.mode in (MODE_MULTIMODAL, MODE_VISION, MODE_OPENLOOP)

    @property
    def uses_haptic(self) -> bool:
        return self.mode in (MODE_MULTIMODAL, MODE_HAPTIC)

    @property
    def dtype(self):
        return self.head.params["W"].dtype

    def parameters(self):
        return (self.visual.named_params("visual")
                + [(f"haptic.{n}", self.haptic.params[n], self.haptic.grads[n])
                   for n in self.haptic.params]
                + [(f"head.{n}", self.head.params[n], self.head.grads[n])
                   for n in self.head.params])

    def zero_grads(self):
        self.visual.zero_grads()
        self.haptic.zero_grads()
        self.head.zero_grads()

    def astype(self, dtype):
        self.visual.astype(dtype)
        self.haptic.astype(dtype)
        self.head.astype(dtype)
        return self

    def _batch(self, images, traces):
        n = len(images) if images is not None else len(traces)
        if self.uses_vision:
            if images is None:
                raise ConfigError(f"mode {self.mode!r} needs an image input")
            images = np.asarray(images, dtype=self.dtype)
        if self.uses_haptic:
            if traces is None:
                raise ConfigError(f"mode {self.mode!r} needs a haptic trace input")
            traces = np.asarray(traces, dtype=self.dtype) * TRACE_SCALE
            if traces.ndim == 2:
                traces = traces[:, :, None]
            if traces.shape[1] != TRACE_LEN:
                raise ConfigError(f"traces must have {TRACE_LEN} samples")
        return n, images, traces

    def embed(self, images=None, traces=None) -> np.ndarray:
        """48-d fused embedding; the unused branch contributes zeros."""
        n, images, traces = self._batch(images, traces)
        vis = self.visual.forward(images) if self.uses_vision \
            else np.zeros((n, VISUAL_DIM), dtype=self.dtype)
        hap = self.haptic.forward(traces) if self.uses_haptic \
            else np.zeros((n, HAPTIC_DIM), dtype=self.dtype)
        return np.concatenate([vis, hap], axis=1)

    def logits(self, images=None, traces=None) -> np.ndarray:
        return self.head.forward(self.embed(images, traces))

    def predict_proba(self, images=None, traces=None) -> np.ndarray:
        return softmax(self.logits(images, traces))

    def loss(self, sample) -> float:
        images, traces, labels = sample
        return cross_entropy(self.logits(images, traces), labels)

    def loss_and_grad(self, sample) -> float:
        images, traces, labels = sample
        z = self.logits(images, traces)
        dz = cross_entropy_grad(z, labels).astype(self.dtype)
        demb = self.head.backward(dz)
        if self.uses_vision:
            self.visual.backward(demb[:, :VISUAL_DIM])
        if self.uses_haptic:
            self.haptic.backward(demb[:, VISUAL_DIM:])
        return cross_entropy(z, labels)

    def save(self, path, config: dict | None = None):
        save_checkpoint(path, self.KIND, {"mode": self.mode, **(config or {})},
                        self.seed, self.parameters())

    @classmethod
    def load(cls, path) -> "PolicyModel":
        payload = load_checkpoint(path)
        if payload["kind"] != cls.KIND:
            raise CheckpointError(f"not a policy checkpoint: {path}")
        model = cls(mode=payload["config"]["mode"], seed=payload["seed"])
        restore_params(payload, model.parameters())
        model.train_config = payload["config"]
        return model


def infer_primitive(model: PolicyModel, image=None, trace=None) -> tuple:
    """Pick the primitive with the higher predicted success likelihood.

    Ties go to the angled skewer, the gentler choice on an unknown item.
    """
    images = None if image is None else np.asarray(image)[None]
    traces = None if trace is None else np.asarray(trace)[None]
    probs = model.predict_proba(images, traces)[0]
    primitive = Primitive.ANGLED_SKEWER if probs[1] >= probs[0] else Primitive.VERTICAL_SKEWER
    return primitive, probs
