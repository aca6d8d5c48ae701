"""
Temporal Attention

Channel-wise temporal attention: a single T x T map shared by every channel
scores each time step, a softmax over time turns the scores into one temporal
mask per channel, and the context vector is the mask-weighted sum over time.
Also the two ablation variants: one scalar score per time step
(tanh-projected) and a plain sum over time.

The functional ops accept a single (T, C) window or an (N, T, C) batch.
"""

from dataclasses import dataclass

import numpy as np

from models import DimensionError
from .layers import Layer, fan_in_uniform, softmax_rows, softmax_backward


@dataclass(frozen=True)
class AttentionParams:
    """Shared time map W_ht (T x T) and bias b_t (scalar or length T)."""
    W_ht: np.ndarray
    b_t: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W_ht, dtype=np.float64)
        b = np.asarray(self.b_t, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise DimensionError(f'W_ht must be square over time, got shape {W.shape}')
        if b.shape not in ((), (W.shape[0],)):
            raise DimensionError(f'b_t must be a scalar or length {W.shape[0]}, got shape {b.shape}')
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise DimensionError('attention parameters must be finite')
        object.__setattr__(self, 'W_ht', W)
        object.__setattr__(self, 'b_t', b)

    @property
    def timesteps(self):
        return self.W_ht.shape[0]

    @classmethod
    def zeros(cls, timesteps, per_timestep=False):
        return cls(
            W_ht=np.zeros((timesteps, timesteps)),
            b_t=np.zeros(timesteps) if per_timestep else np.zeros(()),
        )


def _batched(h):
    h = np.asarray(h, dtype=np.float64)
    if h.ndim == 2:
        return h[None], True
    if h.ndim != 3:
        raise DimensionError(f'expected (T, C) or (N, T, C) input, got shape {h.shape}')
    return h, False


def _time_bias(b_t):
    # Broadcasts over (N, T, C) scores: scalar, or one bias per output step.
    return b_t if b_t.ndim == 0 else b_t[:, None]


def _channel_weights(h, W_ht, b_t):
    """Softmax-over-time weights, (N, T, C)."""
    if h.shape[1] != W_ht.shape[0]:
        raise DimensionError(f'input has {h.shape[1]} time steps, W_ht expects {W_ht.shape[0]}')
    scores = np.einsum('st,ntc->nsc', W_ht, h) + _time_bias(b_t)
    return softmax_rows(scores, axis=1)


def _raffel_weights(h, W_hc, b):
    """Softmax-over-time weights of the scalar-score variant, (N, T) plus tanh scores."""
    if h.shape[2] != W_hc.shape[0]:
        raise DimensionError(f'input has {h.shape[2]} channels, W_hc expects {W_hc.shape[0]}')
    scores = np.tanh(h @ W_hc + b)
    return softmax_rows(scores, axis=1), scores


def attend(h, p):
    """
    Context vector of the channel-wise temporal attention.

    alpha = softmax over time of (W_ht . h^T + b_t), one row per channel;
    c = sum over t of alpha^T * h.

    Args:
        h: (T, C) window or (N, T, C) batch
        p: AttentionParams

    Returns:
        (C,) or (N, C) context
    """
    batch, single = _batched(h)
    weights = _channel_weights(batch, p.W_ht, p.b_t)
    context = (weights * batch).sum(axis=1)
    return context[0] if single else context


def attention_map(h, p):
    """The alpha matrix (C x T per window) whose rows each sum to 1."""
    batch, single = _batched(h)
    alpha = _channel_weights(batch, p.W_ht, p.b_t).transpose(0, 2, 1)
    return alpha[0] if single else alpha


def attend_raffel(h, W_hc, b):
    """Scalar score tanh(h_t . W_hc + b) per step, softmax over t, c = sum alpha_t h_t."""
    batch, single = _batched(h)
    alpha, _ = _raffel_weights(batch, np.asarray(W_hc, dtype=np.float64), b)
    context = np.einsum('nt,ntc->nc', alpha, batch)
    return context[0] if single else context


def attend_sum(h):
    """Plain sum over time."""
    batch, single = _batched(h)
    context = batch.sum(axis=1)
    return context[0] if single else context


# =========== LAYERS ===========

class ChannelAttention(Layer):
    kind = 'attention'

    def __init__(self, name, timesteps, rng, per_timestep_bias=False):
        super().__init__(name)
        self.add_param('W_ht', fan_in_uniform(rng, (timesteps, timesteps), timesteps))
        self.add_param('b_t', np.zeros(timesteps) if per_timestep_bias else np.zeros(()))
        self._h = None
        self._weights = None

    @property
    def attention_params(self):
        return AttentionParams(W_ht=self.params['W_ht'], b_t=self.params['b_t'])

    @property
    def last_alpha(self):
        """alpha of the most recent forward, (N, C, T)."""
        return self._weights.transpose(0, 2, 1)

    def forward(self, x, training=False, rng=None):
        self._h = x
        self._weights = _channel_weights(x, self.params['W_ht'], self.params['b_t'])
        return (self._weights * x).sum(axis=1)

    def backward(self, grad):
        h, weights = self._h, self._weights
        grad_weights = grad[:, None, :] * h
        grad_scores = softmax_backward(weights, grad_weights, axis=1)
        self.accumulate('W_ht', np.einsum('nsc,ntc->st', grad_scores, h))
        if self.params['b_t'].ndim == 0:
            self.accumulate('b_t', grad_scores.sum())
        else:
            self.accumulate('b_t', grad_scores.sum(axis=(0, 2)))
        return grad[:, None, :] * weights + np.einsum('st,nsc->ntc', self.params['W_ht'], grad_scores)


class RaffelAttention(Layer):
    kind = 'attention'

    def __init__(self, name, channels, rng):
        super().__init__(name)
        self.add_param('W_hc', fan_in_uniform(rng, (channels,), channels))
        self.add_param('b', np.zeros(()))
        self._h = None
        self._alpha = None
        self._scores = None

    @property
    def last_alpha(self):
        """Per-step weights broadcast to every channel, (N, C, T)."""
        n, steps = self._alpha.shape
        return np.broadcast_to(self._alpha[:, None, :], (n, self._h.shape[2], steps))

    def forward(self, x, training=False, rng=None):
        self._h = x
        self._alpha, self._scores = _raffel_weights(x, self.params['W_hc'], self.params['b'])
        return np.einsum('nt,ntc->nc', self._alpha, x)

    def backward(self, grad):
        h, alpha = self._h, self._alpha
        grad_alpha = np.einsum('ntc,nc->nt', h, grad)
        grad_pre = softmax_backward(alpha, grad_alpha, axis=1) * (1.0 - self._scores ** 2)
        self.accumulate('W_hc', np.einsum('nt,ntc->c', grad_pre, h))
        self.accumulate('b', grad_pre.sum())
        return alpha[:, :, None] * grad[:, None, :] + grad_pre[:, :, None] * self.params['W_hc']


class TemporalSum(Layer):
    kind = 'attention'

    def __init__(self, name):
        super().__init__(name)
        self._shape = None

    @property
    def last_alpha(self):
        n, steps, channels = self._shape
        return np.ones((n, channels, steps))

    def forward(self, x, training=False, rng=None):
        self._shape = x.shape
        return x.sum(axis=1)

    def backward(self, grad):
        return np.broadcast_to(grad[:, None, :], self._shape).copy()
