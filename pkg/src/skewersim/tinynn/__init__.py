"""Minimal from-scratch neural kernel: layers, losses, Adam, gradient check."""

from .checkpoint import load_checkpoint, restore_params, save_checkpoint
from .gradcheck import gradient_check
from .layers import (
    Conv3x3,
    Dense,
    Flatten,
    GatedRecurrentCell,
    Layer,
    Sequential,
    Sigmoid,
    Tanh,
    glorot,
)
from .losses import EPS, bce, bce_grad, cross_entropy, cross_entropy_grad, softmax
from .optim import Adam

__all__ = [name for name in dir() if not name.startswith("_")]
