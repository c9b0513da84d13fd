"""Adaptive-moment gradient descent with bias correction."""

from __future__ import annotations

import numpy as np


class Adam:
    """Holds first/second moment accumulators mirroring the parameter list.

    ``params`` is a list of (name, param_array, grad_array) triples; arrays
    are updated in place so the owning layers see the new values.
    """

    def __init__(self, params: list, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p) for _, p, _ in params]
        self.v = [np.zeros_like(p) for _, p, _ in params]

    def step(self):
        self.step_count += 1
        t = self.step_count
        b1, b2 = self.beta1, self.beta2
        corr1 = 1.0 - b1 ** t
        corr2 = 1.0 - b2 ** t
        for (name, p, g), m, v in zip(self.params, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            m_hat = m / corr1
            v_hat = v / corr2
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grads(self):
        for _, _, g in self.params:
            g[...] = 0.0
