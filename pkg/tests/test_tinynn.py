"""Neural kernel: forward identities, gradient checks, losses, optimizer."""

import math

import numpy as np
import pytest

from skewersim.errors import DimensionError
from skewersim.tinynn import (
    Adam,
    Conv3x3,
    Dense,
    GatedRecurrentCell,
    Sequential,
    Sigmoid,
    Tanh,
    bce,
    bce_grad,
    cross_entropy,
    cross_entropy_grad,
    gradient_check,
    load_checkpoint,
    restore_params,
    save_checkpoint,
    softmax,
)


class NetLoss:
    """Wrap a Sequential with L = 0.5 * sum(y^2) for gradient checking."""

    def __init__(self, net):
        self.net = net

    def parameters(self):
        return self.net.named_params("net")

    def zero_grads(self):
        self.net.zero_grads()

    def loss(self, x):
        y = self.net.forward(x)
        return 0.5 * float((y * y).sum())

    def loss_and_grad(self, x):
        y = self.net.forward(x)
        self.net.backward(y.copy())
        return 0.5 * float((y * y).sum())


def test_dense_identity():
    rng = np.random.default_rng(0)
    layer = Dense(4, 4, rng)
    layer.params["W"][...] = np.eye(4)
    layer.params["b"][...] = 0.0
    x = rng.normal(size=(3, 4)).astype(np.float32)
    assert np.allclose(layer.forward(x), x)


def test_dense_linearity_with_zero_bias():
    rng = np.random.default_rng(1)
    layer = Dense(5, 3, rng)
    layer.params["b"][...] = 0.0
    x1 = rng.normal(size=(2, 5)).astype(np.float32)
    x2 = rng.normal(size=(2, 5)).astype(np.float32)
    lhs = layer.forward(2.0 * x1 + 3.0 * x2)
    rhs = 2.0 * layer.forward(x1) + 3.0 * layer.forward(x2)
    assert np.allclose(lhs, rhs, atol=1e-5)


def test_dense_zero_upstream_zero_grads():
    rng = np.random.default_rng(2)
    layer = Dense(4, 2, rng)
    x = rng.normal(size=(3, 4)).astype(np.float32)
    layer.forward(x)
    dx = layer.backward(np.zeros((3, 2), dtype=np.float32))
    assert np.all(dx == 0.0)
    assert np.all(layer.grads["W"] == 0.0)
    assert np.all(layer.grads["b"] == 0.0)


def test_gru_zero_weights_keeps_hidden_zero():
    rng = np.random.default_rng(3)
    cell = GatedRecurrentCell(2, 6, rng)
    for name in cell.params:
        cell.params[name][...] = 0.0
    x = rng.normal(size=(4, 9, 2)).astype(np.float32)
    h = cell.forward(x)
    assert np.all(h == 0.0)


def test_conv_center_one_kernel_subsamples():
    # index-arithmetic oracle: pad 1, stride 2 puts output (i, j) on input
    # (2i, 2j), so a kernel that is 1 at its center copies the even grid
    rng = np.random.default_rng(4)
    conv = Conv3x3(1, 1, rng, stride=2)
    conv.params["W"][...] = 0.0
    conv.params["W"][4, 0] = 1.0  # center tap of the 3x3 kernel
    conv.params["b"][...] = 0.0
    x = rng.normal(size=(1, 8, 8, 1)).astype(np.float32)
    y = conv.forward(x)
    assert y.shape == (1, 4, 4, 1)
    assert np.allclose(y[0, :, :, 0], x[0, ::2, ::2, 0])


def test_conv_shapes():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(2, 32, 32, 3)).astype(np.float32)
    y = Conv3x3(3, 8, rng, stride=2).forward(x)
    assert y.shape == (2, 16, 16, 8)
    y = Conv3x3(3, 8, rng, stride=1).forward(x)
    assert y.shape == (2, 32, 32, 8)
    with pytest.raises(DimensionError):
        Conv3x3(4, 8, rng).forward(x)


def test_backward_before_forward_raises():
    rng = np.random.default_rng(6)
    layer = Dense(3, 3, rng)
    with pytest.raises(RuntimeError):
        layer.backward(np.zeros((1, 3), dtype=np.float32))


@pytest.mark.parametrize("build,shape", [
    (lambda rng: Sequential([Dense(6, 4, rng, dtype=np.float64), Tanh()]), (3, 6)),
    (lambda rng: Sequential([Conv3x3(2, 3, rng, stride=2, dtype=np.float64), Tanh()]), (2, 6, 6, 2)),
    (lambda rng: Sequential([Conv3x3(2, 2, rng, stride=1, dtype=np.float64), Sigmoid()]), (2, 5, 5, 2)),
    (lambda rng: Sequential([GatedRecurrentCell(1, 5, rng, dtype=np.float64), Tanh()]), (3, 7, 1)),
])
def test_finite_difference_per_layer(build, shape):
    rng = np.random.default_rng(7)
    model = NetLoss(build(rng))
    x = rng.normal(size=shape)
    assert gradient_check(model, x) < 1e-4


def test_corrupted_dense_backward_detected():
    # mutation test: an off-by-transpose backward must blow past 1e-2
    rng = np.random.default_rng(8)
    dense = Dense(5, 5, rng, dtype=np.float64)

    def bad_backward(dy):
        x = dense._cache
        dense.grads["W"] += (x.T @ dy).T   # transposed on purpose
        dense.grads["b"] += dy.sum(axis=0)
        return dy @ dense.params["W"].T

    dense.backward = bad_backward
    model = NetLoss(Sequential([dense, Tanh()]))
    x = rng.normal(size=(3, 5))
    assert gradient_check(model, x) > 1e-2


def test_zero_parameter_model_vacuous_pass():
    model = NetLoss(Sequential([Tanh()]))
    assert gradient_check(model, np.ones((1, 3))) == 0.0


def test_forward_outputs_finite_random_inputs():
    rng = np.random.default_rng(9)
    dense = Dense(8, 8, rng)
    conv = Conv3x3(2, 4, rng)
    gru = GatedRecurrentCell(1, 8, rng)
    for _ in range(1000):
        assert np.all(np.isfinite(dense.forward(rng.normal(size=(1, 8)).astype(np.float32) * 10)))
        assert np.all(np.isfinite(conv.forward(rng.normal(size=(1, 6, 6, 2)).astype(np.float32) * 10)))
        assert np.all(np.isfinite(gru.forward(rng.normal(size=(1, 5, 1)).astype(np.float32) * 10)))


def test_cross_entropy_values():
    assert cross_entropy(np.array([[1.0, 1.0]]), np.array([0])) == pytest.approx(math.log(2.0), abs=1e-9)
    # logits (3, 0), label 0 -> ln(1 + e^-3)
    assert cross_entropy(np.array([[3.0, 0.0]]), np.array([0])) == pytest.approx(
        math.log(1.0 + math.exp(-3.0)), abs=1e-9)
    assert cross_entropy(np.array([[3.0, 0.0]]), np.array([0])) == pytest.approx(0.04859, abs=1e-5)


def test_cross_entropy_grad_at_confident_correct_prediction():
    logits = np.array([[60.0, -60.0]])
    g = cross_entropy_grad(logits, np.array([0]))
    assert np.max(np.abs(g)) < 1e-9


def test_cross_entropy_grad_matches_finite_difference():
    rng = np.random.default_rng(10)
    logits = rng.normal(size=(4, 2))
    labels = np.array([0, 1, 1, 0])
    g = cross_entropy_grad(logits, labels)
    h = 1e-6
    for i in range(4):
        for j in range(2):
            up = logits.copy(); up[i, j] += h
            dn = logits.copy(); dn[i, j] -= h
            num = (cross_entropy(up, labels) - cross_entropy(dn, labels)) / (2 * h)
            assert g[i, j] == pytest.approx(num, abs=1e-6)


def test_bce_values():
    target = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert bce(target, target) <= 1e-11
    half = np.full_like(target, 0.5)
    assert bce(half, target) == pytest.approx(math.log(2.0), abs=1e-12)
    g = bce_grad(half, target)
    assert np.allclose(g, (half - target) / (0.5 * 0.5) / 4)


def test_softmax_normalization():
    rng = np.random.default_rng(11)
    p = softmax(rng.normal(size=(100, 2)) * 5)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-6)


def test_adam_zero_grad_no_op():
    rng = np.random.default_rng(12)
    layer = Dense(3, 3, rng)
    before = layer.params["W"].copy()
    opt = Adam(layer_params(layer))
    opt.step()
    assert np.allclose(layer.params["W"], before)


def layer_params(layer):
    return [(n, layer.params[n], layer.grads[n]) for n in layer.params]


def test_adam_first_step_magnitude():
    # bias-corrected moments cancel at t=1: update magnitude equals lr
    p = np.array([1.0])
    g = np.array([1.0])
    opt = Adam([("w", p, g)], lr=1e-3)
    opt.step()
    assert p[0] == pytest.approx(1.0 - 1e-3, abs=1e-9)


def test_adam_determinism():
    def run():
        rng = np.random.default_rng(13)
        layer = Dense(4, 2, rng)
        opt = Adam(layer_params(layer), lr=1e-2)
        x = np.random.default_rng(14).normal(size=(8, 4)).astype(np.float32)
        for _ in range(10):
            layer.zero_grads()
            y = layer.forward(x)
            layer.backward(y)
            opt.step()
        return layer.params["W"].copy()

    assert np.array_equal(run(), run())


def test_seeded_init_reproducible():
    a = Dense(7, 5, np.random.default_rng(99)).params["W"]
    b = Dense(7, 5, np.random.default_rng(99)).params["W"]
    assert np.array_equal(a, b)


def test_checkpoint_roundtrip(tmp_path):
    rng = np.random.default_rng(15)
    layer = Dense(4, 3, rng)
    path = tmp_path / "model.json"
    save_checkpoint(path, "dense", {"lr": 1e-3}, 15, layer_params(layer))
    payload = load_checkpoint(path)
    assert payload["kind"] == "dense"
    fresh = Dense(4, 3, np.random.default_rng(0))
    restore_params(payload, layer_params(fresh))
    assert np.array_equal(fresh.params["W"], layer.params["W"])
