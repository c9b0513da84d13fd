"""Central finite-difference gradient verification.

A checkable model exposes ``parameters()`` (list of (name, param, grad)
triples), ``zero_grads()``, ``loss(sample)`` and ``loss_and_grad(sample)``.
The check perturbs every parameter entry and compares the analytic gradient
against (f(p + h) - f(p - h)) / 2h in double precision.
"""

from __future__ import annotations

import numpy as np


def gradient_check(model, sample, h: float = 1e-5) -> float:
    """Return the maximum relative gradient error over every parameter entry."""
    params = model.parameters()
    if not params:
        return 0.0
    model.zero_grads()
    model.loss_and_grad(sample)
    analytic = [g.copy() for _, _, g in params]

    max_rel = 0.0
    for (name, p, _), ga in zip(params, analytic):
        flat_p = p.reshape(-1)
        flat_g = ga.reshape(-1)
        for idx in range(flat_p.size):
            orig = flat_p[idx]
            flat_p[idx] = orig + h
            up = model.loss(sample)
            flat_p[idx] = orig - h
            down = model.loss(sample)
            flat_p[idx] = orig
            numeric = (up - down) / (2.0 * h)
            denom = max(1e-12, abs(numeric) + abs(flat_g[idx]))
            rel = abs(numeric - flat_g[idx]) / denom
            max_rel = max(max_rel, rel)
    return max_rel
