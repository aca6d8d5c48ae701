"""
Tests for the differentiable layers and activations.
"""

import numpy as np
import pytest

from models import ConfigError, DimensionError
from nn import (
    Activation,
    Conv1D,
    Dense,
    Dropout,
    LayerNorm,
    conv1d_forward,
    dense_forward,
    dropout,
    gradient_check,
    layernorm_forward,
    mish,
    mish_grad,
    numerical_gradient,
    relu,
    softmax_rows,
    tanh,
)

SEEDS = range(20)


def check_layer_gradients(layer, x, seed):
    """Compare backward against central differences for input and every parameter."""
    rng = np.random.default_rng(seed + 1000)
    upstream = rng.standard_normal(layer.forward(x).shape)

    def loss():
        return float(np.sum(layer.forward(x) * upstream))

    layer.zero_grad()
    layer.forward(x)
    grad_x = layer.backward(upstream)
    analytic = {key: g.copy() for key, g in layer.grads.items()}

    assert gradient_check(loss, x, grad_x) < 1e-4
    for key, param in layer.params.items():
        assert gradient_check(loss, param, analytic[key]) < 1e-4, key


def test_dense_identity():
    x = np.arange(6, dtype=np.float64).reshape(2, 3)
    assert np.array_equal(dense_forward(x, np.eye(3), np.zeros(3)), x)


def test_dense_scalar_case():
    out = dense_forward(np.array([[2.0]]), np.array([[3.0]]), np.array([1.0]))
    assert out.tolist() == [[7.0]]


def test_dense_shape_mismatch():
    with pytest.raises(DimensionError):
        dense_forward(np.ones((2, 3)), np.ones((4, 2)), np.zeros(2))


@pytest.mark.parametrize('seed', SEEDS)
def test_dense_gradients(seed):
    rng = np.random.default_rng(seed)
    layer = Dense('fc', 5, 4, rng)
    layer.params['b'][...] = rng.standard_normal(4)
    check_layer_gradients(layer, rng.standard_normal((3, 5)), seed)


def test_dense_batched_over_time(rng):
    layer = Dense('fc', 4, 3, rng)
    x = rng.standard_normal((2, 6, 4))
    out = layer.forward(x)
    assert out.shape == (2, 6, 3)
    assert np.allclose(out[1, 2], x[1, 2] @ layer.params['W'])


def test_frozen_dense_keeps_zero_gradients(rng):
    layer = Dense('fc', 3, 2, rng, frozen=True)
    layer.forward(rng.standard_normal((4, 3)))
    layer.backward(np.ones((4, 2)))
    assert not layer.grads['W'].any()
    assert layer.parameter_count(trainable_only=True) == 0
    assert layer.parameter_count() == 8


def test_conv1d_delta_kernel_is_identity(rng):
    x = rng.standard_normal((7, 3))
    K = np.zeros((3, 3, 3))
    K[1] = np.eye(3)
    assert np.allclose(conv1d_forward(x, K, np.zeros(3)), x)


def test_conv1d_averaging_kernel():
    x = np.ones((6, 1))
    out = conv1d_forward(x, np.full((3, 1, 1), 1.0 / 3.0), np.zeros(1))
    assert out.shape == (6, 1)
    assert np.allclose(out[1:-1], 1.0)
    assert np.allclose(out[[0, -1]], 2.0 / 3.0)


def test_conv1d_rejects_even_kernel():
    with pytest.raises(ConfigError):
        conv1d_forward(np.ones((5, 2)), np.ones((2, 2, 2)), np.zeros(2))


def test_conv1d_channel_mismatch():
    with pytest.raises(DimensionError):
        conv1d_forward(np.ones((5, 2)), np.ones((3, 3, 2)), np.zeros(2))


@pytest.mark.parametrize('seed', SEEDS)
def test_conv1d_gradients(seed):
    rng = np.random.default_rng(seed)
    layer = Conv1D('conv', 3, 4, rng)
    layer.params['b'][...] = rng.standard_normal(4)
    check_layer_gradients(layer, rng.standard_normal((2, 6, 3)), seed)


def test_layernorm_normalizes_rows(rng):
    x = rng.standard_normal((4, 16)) * 3.0 + 2.0
    out = layernorm_forward(x, np.ones(16), np.zeros(16))
    assert np.allclose(out.mean(axis=1), 0.0, atol=1e-10)
    assert np.allclose(out.var(axis=1), 1.0, atol=1e-6)


def test_layernorm_constant_row_is_zero():
    out = layernorm_forward(np.full((1, 8), 3.0), np.ones(8), np.zeros(8))
    assert np.allclose(out, 0.0)


def test_layernorm_needs_two_features():
    with pytest.raises(DimensionError):
        layernorm_forward(np.ones((3, 1)), np.ones(1), np.zeros(1))


@pytest.mark.parametrize('seed', SEEDS)
def test_layernorm_gradients(seed):
    rng = np.random.default_rng(seed)
    layer = LayerNorm('norm', 6)
    layer.params['gain'][...] = rng.uniform(0.5, 1.5, 6)
    layer.params['shift'][...] = rng.standard_normal(6)
    check_layer_gradients(layer, rng.standard_normal((2, 3, 6)), seed)


def test_mish_at_zero():
    assert mish(np.array(0.0)) == 0.0


def test_mish_gradient_matches_finite_differences():
    x = np.array([-5.0, -1.0, 0.0, 1.0, 5.0])
    numeric = numerical_gradient(lambda: float(np.sum(mish(x))), x, h=1e-6)
    analytic = mish_grad(x)
    assert np.all(np.abs(analytic - numeric) <= 1e-5 * np.abs(numeric) + 1e-12)


def test_relu_and_tanh():
    x = np.array([-2.0, 0.0, 3.0])
    assert relu(x).tolist() == [0.0, 0.0, 3.0]
    assert np.allclose(tanh(x), np.tanh(x))


def test_softmax_rows_sum_to_one(rng):
    x = rng.standard_normal((10, 7)) * 50.0
    assert np.allclose(softmax_rows(x).sum(axis=1), 1.0, atol=1e-12)


def test_softmax_is_stable_for_large_inputs():
    out = softmax_rows(np.array([[1000.0, 1000.0]]))
    assert np.allclose(out, 0.5)


@pytest.mark.parametrize('activation', ['mish', 'tanh'])
@pytest.mark.parametrize('seed', range(5))
def test_activation_gradients(activation, seed):
    rng = np.random.default_rng(seed)
    check_layer_gradients(Activation('act', activation), rng.standard_normal((3, 4)), seed)


def test_unknown_activation():
    with pytest.raises(ConfigError):
        Activation('act', 'swish')


def test_dropout_identity_cases(rng):
    x = rng.standard_normal((5, 5))
    assert dropout(x, rate=0.0, rng=rng, training=True) is x
    assert dropout(x, rate=0.9, rng=rng, training=False) is x


def test_dropout_preserves_expected_value():
    x = np.ones((8, 8))
    rng = np.random.default_rng(0)
    total = np.zeros_like(x)
    for _ in range(10000):
        total += dropout(x, rate=0.36, rng=rng, training=True)
    assert abs((total / 10000).mean() - 1.0) < 0.01


def test_dropout_layer_backward_uses_mask(rng):
    layer = Dropout('drop', 0.5)
    out = layer.forward(np.ones((4, 6)), training=True, rng=rng)
    grad = layer.backward(np.ones((4, 6)))
    assert np.array_equal(out, grad)
    assert set(np.unique(out).tolist()) <= {0.0, 2.0}
