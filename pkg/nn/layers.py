"""
Differentiable Layers

Dense, same-padded 1-D convolution, layer normalization, activations and
inverted dropout. Each operation has a functional forward/backward pair and a
Layer wrapper that owns its parameters and gradient slots. Arrays are float64
and batched: (N, F) or (N, T, F).
"""

import numpy as np
from scipy.special import expit

from models import DimensionError, ConfigError, ValidationError


# =========== FUNCTIONAL OPS ===========

def dense_forward(x, W, b):
    """out = x W + b, applied over the last axis."""
    if x.shape[-1] != W.shape[0] or b.shape != (W.shape[1],):
        raise DimensionError(
            f'dense: input width {x.shape[-1]} vs weight {W.shape} and bias {b.shape}'
        )
    return x @ W + b


def dense_backward(x, W, grad):
    """Return (grad_x, grad_W, grad_b)."""
    flat_x = x.reshape(-1, W.shape[0])
    flat_g = grad.reshape(-1, W.shape[1])
    return grad @ W.T, flat_x.T @ flat_g, flat_g.sum(axis=0)


def _conv_columns(x, kernel_size):
    """Stack the kernel_size shifted copies of a zero-padded (N, T, C) input."""
    pad = kernel_size // 2
    padded = np.pad(x, ((0, 0), (pad, pad), (0, 0)))
    steps = x.shape[1]
    return np.stack([padded[:, j:j + steps, :] for j in range(kernel_size)], axis=2)


def conv1d_forward(x, K, b):
    """
    Same-padded 1-D convolution over time.

    Args:
        x: (N, T, C_in) or (T, C_in)
        K: (k, C_in, C_out) kernel with odd k
        b: (C_out,)
    """
    single = x.ndim == 2
    if single:
        x = x[None]
    k, c_in, c_out = K.shape
    if k % 2 == 0:
        raise ConfigError(f'conv1d kernel size must be odd, got {k}')
    if x.shape[-1] != c_in or b.shape != (c_out,):
        raise DimensionError(f'conv1d: input channels {x.shape[-1]} vs kernel {K.shape}')
    columns = _conv_columns(x, k).reshape(x.shape[0], x.shape[1], k * c_in)
    out = columns @ K.reshape(k * c_in, c_out) + b
    return out[0] if single else out


def conv1d_backward(x, K, grad):
    """Return (grad_x, grad_K, grad_b) for conv1d_forward."""
    single = x.ndim == 2
    if single:
        x, grad = x[None], grad[None]
    k, c_in, c_out = K.shape
    n, steps, _ = x.shape
    pad = k // 2
    columns = _conv_columns(x, k).reshape(-1, k * c_in)
    flat_g = grad.reshape(-1, c_out)
    grad_K = (columns.T @ flat_g).reshape(k, c_in, c_out)
    grad_columns = (grad @ K.reshape(k * c_in, c_out).T).reshape(n, steps, k, c_in)
    grad_padded = np.zeros((n, steps + 2 * pad, c_in))
    for j in range(k):
        grad_padded[:, j:j + steps, :] += grad_columns[:, :, j, :]
    grad_x = grad_padded[:, pad:pad + steps, :]
    if single:
        grad_x = grad_x[0]
    return grad_x, grad_K, flat_g.sum(axis=0)


def _layernorm_stats(x, eps):
    mean = x.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(x.var(axis=-1, keepdims=True) + eps)
    return (x - mean) * inv_std, inv_std


def layernorm_forward(x, gain, shift, eps=1e-8):
    """Normalize each row to zero mean and unit variance, then gain * norm + shift."""
    if x.shape[-1] < 2:
        raise DimensionError('layer normalization needs rows of length >= 2')
    if gain.shape != (x.shape[-1],) or shift.shape != (x.shape[-1],):
        raise DimensionError(f'layernorm: row length {x.shape[-1]} vs gain {gain.shape}')
    normed, _ = _layernorm_stats(x, eps)
    return gain * normed + shift


def layernorm_backward(x, gain, grad, eps=1e-8):
    """Return (grad_x, grad_gain, grad_shift)."""
    normed, inv_std = _layernorm_stats(x, eps)
    width = x.shape[-1]
    grad_normed = grad * gain
    grad_x = inv_std / width * (
        width * grad_normed
        - grad_normed.sum(axis=-1, keepdims=True)
        - normed * (grad_normed * normed).sum(axis=-1, keepdims=True)
    )
    flat = grad.reshape(-1, width)
    return grad_x, (flat * normed.reshape(-1, width)).sum(axis=0), flat.sum(axis=0)


def mish(x):
    """x * tanh(softplus(x))."""
    return x * np.tanh(np.logaddexp(0.0, x))


def mish_grad(x):
    t = np.tanh(np.logaddexp(0.0, x))
    return t + x * (1.0 - t * t) * expit(x)


def relu(x):
    return np.maximum(x, 0.0)


def relu_grad(x):
    return (x > 0).astype(np.float64)


def tanh(x):
    return np.tanh(x)


def tanh_grad(x):
    t = np.tanh(x)
    return 1.0 - t * t


def softmax_rows(x, axis=-1):
    """Softmax along axis, stabilized by subtracting the maximum."""
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def softmax_backward(y, grad, axis=-1):
    """Gradient wrt softmax input given its output y."""
    return y * (grad - (grad * y).sum(axis=axis, keepdims=True))


def dropout_mask(shape, rate, rng):
    """Inverted-dropout mask: zeros with probability rate, 1/(1-rate) otherwise."""
    return (rng.random(shape) >= rate) / (1.0 - rate)


def dropout(x, rate=0.36, rng=None, training=False):
    """Inverted dropout; identity at inference or when rate is 0."""
    if not 0.0 <= rate < 1.0:
        raise ValidationError(f'dropout rate must be in [0, 1), got {rate}')
    if not training or rate == 0.0:
        return x
    return x * dropout_mask(x.shape, rate, rng)


ACTIVATIONS = {
    'mish': (mish, mish_grad),
    'relu': (relu, relu_grad),
    'tanh': (tanh, tanh_grad),
}


def fan_in_uniform(rng, shape, fan_in):
    """U(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


# =========== LAYERS ===========

class Layer:
    """
    Base layer: named parameters with paired gradient slots.

    forward caches what backward needs; backward accumulates into grads and
    returns the gradient wrt the layer input.
    """
    kind = 'layer'

    def __init__(self, name):
        self.name = name
        self.params = {}
        self.grads = {}
        self.trainable = True

    def add_param(self, key, value):
        self.params[key] = np.asarray(value, dtype=np.float64)
        self.grads[key] = np.zeros_like(self.params[key])

    def forward(self, x, training=False, rng=None):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError

    def zero_grad(self):
        for grad in self.grads.values():
            grad.fill(0.0)

    def accumulate(self, key, value):
        if self.trainable:
            self.grads[key] += value

    def parameter_count(self, trainable_only=False):
        if trainable_only and not self.trainable:
            return 0
        return int(sum(p.size for p in self.params.values()))

    def __repr__(self):
        return f'{type(self).__name__}({self.name!r})'


class Dense(Layer):
    kind = 'dense'

    def __init__(self, name, in_features, out_features, rng, frozen=False):
        super().__init__(name)
        self.add_param('W', fan_in_uniform(rng, (in_features, out_features), in_features))
        self.add_param('b', np.zeros(out_features))
        self.trainable = not frozen
        self._x = None

    def forward(self, x, training=False, rng=None):
        self._x = x
        return dense_forward(x, self.params['W'], self.params['b'])

    def backward(self, grad):
        grad_x, grad_W, grad_b = dense_backward(self._x, self.params['W'], grad)
        self.accumulate('W', grad_W)
        self.accumulate('b', grad_b)
        return grad_x


class Conv1D(Layer):
    kind = 'conv1d'

    def __init__(self, name, in_channels, out_channels, rng, kernel_size=3):
        super().__init__(name)
        if kernel_size % 2 == 0:
            raise ConfigError(f'conv1d kernel size must be odd, got {kernel_size}')
        self.add_param(
            'K', fan_in_uniform(rng, (kernel_size, in_channels, out_channels), kernel_size * in_channels)
        )
        self.add_param('b', np.zeros(out_channels))
        self._x = None

    def forward(self, x, training=False, rng=None):
        self._x = x
        return conv1d_forward(x, self.params['K'], self.params['b'])

    def backward(self, grad):
        grad_x, grad_K, grad_b = conv1d_backward(self._x, self.params['K'], grad)
        self.accumulate('K', grad_K)
        self.accumulate('b', grad_b)
        return grad_x


class LayerNorm(Layer):
    kind = 'layernorm'

    def __init__(self, name, features, eps=1e-8):
        super().__init__(name)
        self.eps = eps
        self.add_param('gain', np.ones(features))
        self.add_param('shift', np.zeros(features))
        self._x = None

    def forward(self, x, training=False, rng=None):
        self._x = x
        return layernorm_forward(x, self.params['gain'], self.params['shift'], self.eps)

    def backward(self, grad):
        grad_x, grad_gain, grad_shift = layernorm_backward(self._x, self.params['gain'], grad, self.eps)
        self.accumulate('gain', grad_gain)
        self.accumulate('shift', grad_shift)
        return grad_x


class Activation(Layer):
    kind = 'activation'

    def __init__(self, name, activation):
        super().__init__(name)
        if activation not in ACTIVATIONS:
            raise ConfigError(f'unknown activation {activation!r}')
        self.activation = activation
        self._fn, self._grad = ACTIVATIONS[activation]
        self._x = None

    def forward(self, x, training=False, rng=None):
        self._x = x
        return self._fn(x)

    def backward(self, grad):
        return grad * self._grad(self._x)


class Dropout(Layer):
    kind = 'dropout'

    def __init__(self, name, rate):
        super().__init__(name)
        if not 0.0 <= rate < 1.0:
            raise ConfigError(f'dropout rate must be in [0, 1), got {rate}')
        self.rate = rate
        self._mask = None

    def forward(self, x, training=False, rng=None):
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise ConfigError('dropout in training mode needs a random generator')
        self._mask = dropout_mask(x.shape, self.rate, rng)
        return x * self._mask

    def backward(self, grad):
        return grad if self._mask is None else grad * self._mask


def parameter_count(layers, trainable_only=False):
    """Total parameter count over a layer list."""
    return sum(layer.parameter_count(trainable_only) for layer in layers)
