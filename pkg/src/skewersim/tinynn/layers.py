"""Layers with hand-written reverse-mode gradients.

No autodiff tape: each layer caches what its backward pass needs.  Arrays are
float32 by default; gradient checking casts a model to float64 first.
Initialization is uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DimensionError


def glorot(rng: np.random.Generator, shape: tuple, fan_in: int, fan_out: int, dtype) -> np.ndarray:
    s = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-s, s, size=shape).astype(dtype)


class Layer:
    """Common parameter bookkeeping; subclasses implement forward/backward."""

    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self._cache = None

    def _register(self, **arrays):
        for name, arr in arrays.items():
            self.params[name] = arr
            self.grads[name] = np.zeros_like(arr)

    def zero_grads(self):
        for g in self.grads.values():
            g[...] = 0.0

    def astype(self, dtype):
        for name in self.params:
            self.params[name] = self.params[name].astype(dtype)
            self.grads[name] = self.grads[name].astype(dtype)
        return self

    def forward(self, x):  # pragma: no cover - abstract
        raise NotImplementedError

    def backward(self, dy):  # pragma: no cover - abstract
        raise NotImplementedError

    def _need_cache(self):
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        return self._cache


class Dense(Layer):
    def __init__(self, fan_in: int, fan_out: int, rng: np.random.Generator, dtype=np.float32):
        super().__init__()
        self.fan_in, self.fan_out = fan_in, fan_out
        self._register(
            W=glorot(rng, (fan_in, fan_out), fan_in, fan_out, dtype),
            b=np.zeros(fan_out, dtype=dtype),
        )

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.fan_in:
            raise DimensionError(f"Dense expects (N, {self.fan_in}), got {x.shape}")
        self._cache = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, dy):
        x = self._need_cache()
        self.grads["W"] += x.T @ dy
        self.grads["b"] += dy.sum(axis=0)
        return dy @ self.params["W"].T


class Conv3x3(Layer):
    """3x3 convolution with same padding; stride 2 halves the resolution."""

    K = 3
    PAD = 1

    def __init__(self, c_in: int, c_out: int, rng: np.random.Generator,
                 stride: int = 2, dtype=np.float32):
        super().__init__()
        if stride not in (1, 2):
            raise ValueError("stride must be 1 or 2")
        self.c_in, self.c_out, self.stride = c_in, c_out, stride
        kk = self.K * self.K
        self._register(
            W=glorot(rng, (kk * c_in, c_out), kk * c_in, kk * c_out, dtype),
            b=np.zeros(c_out, dtype=dtype),
        )

    def _out_hw(self, h, w):
        k, p, s = self.K, self.PAD, self.stride
        return (h + 2 * p - k) // s + 1, (w + 2 * p - k) // s + 1

    def _im2col(self, x):
        n, h, w, _ = x.shape
        ho, wo = self._out_hw(h, w)
        k, p, s = self.K, self.PAD, self.stride
        xp = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))
        cols = np.empty((n, ho, wo, k, k, self.c_in), dtype=x.dtype)
        for i in range(k):
            for j in range(k):
                cols[:, :, :, i, j, :] = xp[:, i:i + s * ho:s, j:j + s * wo:s, :]
        return cols.reshape(n, ho, wo, k * k * self.c_in)

    def forward(self, x):
        if x.ndim != 4 or x.shape[3] != self.c_in:
            raise DimensionError(f"Conv3x3 expects (N, H, W, {self.c_in}), got {x.shape}")
        cols = self._im2col(x)
        self._cache = (x.shape, cols)
        return cols @ self.params["W"] + self.params["b"]

    def backward(self, dy):
        x_shape, cols = self._need_cache()
        n, h, w, _ = x_shape
        ho, wo = self._out_hw(h, w)
        k, p, s = self.K, self.PAD, self.stride
        flat_cols = cols.reshape(-1, cols.shape[-1])
        flat_dy = dy.reshape(-1, self.c_out)
        self.grads["W"] += flat_cols.T @ flat_dy
        self.grads["b"] += flat_dy.sum(axis=0)
        dcols = (dy @ self.params["W"].T).reshape(n, ho, wo, k, k, self.c_in)
        dxp = np.zeros((n, h + 2 * p, w + 2 * p, self.c_in), dtype=dy.dtype)
        for i in range(k):
            for j in range(k):
                dxp[:, i:i + s * ho:s, j:j + s * wo:s, :] += dcols[:, :, :, i, j, :]
        return dxp[:, p:p + h, p:p + w, :]


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class GatedRecurrentCell(Layer):
    """Update/reset-gated recurrence over (N, T, D); returns the final state."""

    def __init__(self, d_in: int, hidden: int, rng: np.random.Generator, dtype=np.float32):
        super().__init__()
        self.d_in, self.hidden = d_in, hidden
        arrays = {}
        for gate in ("z", "r", "c"):
            arrays[f"W{gate}"] = glorot(rng, (d_in, hidden), d_in, hidden, dtype)
            arrays[f"U{gate}"] = glorot(rng, (hidden, hidden), hidden, hidden, dtype)
            arrays[f"b{gate}"] = np.zeros(hidden, dtype=dtype)
        self._register(**arrays)

    def forward(self, x):
        if x.ndim != 3 or x.shape[2] != self.d_in:
            raise DimensionError(f"GatedRecurrentCell expects (N, T, {self.d_in}), got {x.shape}")
        p = self.params
        n, t_len, _ = x.shape
        h = np.zeros((n, self.hidden), dtype=x.dtype)
        steps = []
        for t in range(t_len):
            xt = x[:, t, :]
            z = _sigmoid(xt @ p["Wz"] + h @ p["Uz"] + p["bz"])
            r = _sigmoid(xt @ p["Wr"] + h @ p["Ur"] + p["br"])
            c = np.tanh(xt @ p["Wc"] + (r * h) @ p["Uc"] + p["bc"])
            h_new = (1.0 - z) * h + z * c
            steps.append((xt, h, z, r, c))
            h = h_new
        self._cache = (x.shape, steps)
        return h

    def backward(self, dh):
        x_shape, steps = self._need_cache()
        p, g = self.params, self.grads
        dx = np.zeros(x_shape, dtype=dh.dtype)
        dh = dh.copy()
        for t in range(len(steps) - 1, -1, -1):
            xt, h_prev, z, r, c = steps[t]
            dz_pre = dh * (c - h_prev) * z * (1.0 - z)
            dc_pre = dh * z * (1.0 - c * c)
            drh = dc_pre @ p["Uc"].T            # gradient at (r * h_prev)
            dr_pre = drh * h_prev * r * (1.0 - r)
            g["Wz"] += xt.T @ dz_pre
            g["Wr"] += xt.T @ dr_pre
            g["Wc"] += xt.T @ dc_pre
            g["Uz"] += h_prev.T @ dz_pre
            g["Ur"] += h_prev.T @ dr_pre
            g["Uc"] += (r * h_prev).T @ dc_pre
            g["bz"] += dz_pre.sum(axis=0)
            g["br"] += dr_pre.sum(axis=0)
            g["bc"] += dc_pre.sum(axis=0)
            dx[:, t, :] = dz_pre @ p["Wz"].T + dr_pre @ p["Wr"].T + dc_pre @ p["Wc"].T
            dh = (
                dh * (1.0 - z)
                + dz_pre @ p["Uz"].T
                + dr_pre @ p["Ur"].T
                + drh * r
            )
        return dx


class Tanh(Layer):
    def forward(self, x):
        y = np.tanh(x)
        self._cache = y
        return y

    def backward(self, dy):
        y = self._need_cache()
        return dy * (1.0 - y * y)


class Sigmoid(Layer):
    def forward(self, x):
        y = _sigmoid(x)
        self._cache = y
        return y

    def backward(self, dy):
        y = self._need_cache()
        return dy * y * (1.0 - y)


class Flatten(Layer):
    def forward(self, x):
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._need_cache())


class Sequential:
    """Chain of layers sharing the Layer parameter interface."""

    def __init__(self, layers: list):
        self.layers = layers

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dy):
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy

    def zero_grads(self):
        for layer in self.layers:
            layer.zero_grads()

    def astype(self, dtype):
        for layer in self.layers:
            layer.astype(dtype)
        return self

    def named_params(self, prefix: str):
        out = []
        for i, layer in enumerate(self.layers):
            for name in layer.params:
                out.append((f"{prefix}.{i}.{name}", layer.params[name], layer.grads[name]))
        return out
