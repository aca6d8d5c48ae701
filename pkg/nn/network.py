"""
Attention Network Assembly

Builds the expansion -> attention -> classifier -> softmax stack from a
ModelConfig and exposes forward, backward, prediction and attention dumps.
"""

import logging
from dataclasses import dataclass, asdict, replace

import numpy as np

from constants import (
    VALID_EXPANSIONS,
    VALID_ATTENTIONS,
    VALID_CLASSIFIERS,
    VALID_ACTIVATIONS,
    CLASSIFIER_WIDTHS,
    FULL_ARCHITECTURE,
    ABLATIONS,
)
from models import ConfigError, DimensionError, NumericError
from .layers import Dense, Conv1D, LayerNorm, Activation, Dropout, softmax_rows, parameter_count
from .attention import ChannelAttention, RaffelAttention, TemporalSum
from .losses import focal_loss

logger = logging.getLogger(__name__)

PREDICT_CHUNK = 1024


@dataclass(frozen=True)
class ModelConfig:
    """
    Architecture switches plus the input geometry.

    classifier_widths, when set, replaces the (500, 500, 2000) hidden widths;
    the small and none classifiers keep its first one and zero entries.
    """
    timesteps: int
    channels: int
    num_classes: int
    expansion: str = 'dense'
    attention: str = 'channel'
    classifier: str = 'full'
    layernorm: bool = True
    activation: str = 'mish'
    expanded_channels: int = 128
    dropout: float = 0.36
    classifier_widths: tuple = None
    bias_per_timestep: bool = False
    conv_kernel: int = 3

    def __post_init__(self):
        checks = (
            ('expansion', self.expansion, VALID_EXPANSIONS),
            ('attention', self.attention, VALID_ATTENTIONS),
            ('classifier', self.classifier, VALID_CLASSIFIERS),
            ('activation', self.activation, VALID_ACTIVATIONS),
        )
        for field_name, value, allowed in checks:
            if value not in allowed:
                raise ConfigError(f'{field_name} must be one of {sorted(allowed)}, got {value!r}')
        for field_name in ('timesteps', 'channels', 'num_classes', 'expanded_channels'):
            if int(getattr(self, field_name)) < 1:
                raise ConfigError(f'{field_name} must be >= 1, got {getattr(self, field_name)}')
        if self.num_classes < 2:
            raise ConfigError('num_classes must be >= 2')
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f'dropout must be in [0, 1), got {self.dropout}')
        if self.conv_kernel < 1 or self.conv_kernel % 2 == 0:
            raise ConfigError(f'conv_kernel must be a positive odd integer, got {self.conv_kernel}')
        if self.classifier_widths is not None:
            widths = tuple(int(w) for w in self.classifier_widths)
            if len(widths) != len(CLASSIFIER_WIDTHS['full']) or min(widths) < 1:
                raise ConfigError(f'classifier_widths must be three positive widths, got {widths}')
            object.__setattr__(self, 'classifier_widths', widths)

    @property
    def hidden_widths(self):
        default = CLASSIFIER_WIDTHS[self.classifier]
        if self.classifier_widths is None:
            return default
        return self.classifier_widths[:len(default)]

    @property
    def attention_channels(self):
        return self.channels if self.expansion == 'none' else self.expanded_channels

    def with_overrides(self, **overrides):
        return replace(self, **overrides)

    def to_dict(self):
        values = asdict(self)
        if values['classifier_widths'] is not None:
            values['classifier_widths'] = list(values['classifier_widths'])
        return values

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        if values.get('classifier_widths') is not None:
            values['classifier_widths'] = tuple(values['classifier_widths'])
        return cls(**values)

    @classmethod
    def from_config(cls, cfg, timesteps, channels, num_classes, **overrides):
        values = dict(
            timesteps=timesteps,
            channels=channels,
            num_classes=num_classes,
            expansion=cfg.EXPANSION,
            attention=cfg.ATTENTION,
            classifier=cfg.CLASSIFIER,
            layernorm=cfg.LAYERNORM,
            activation=cfg.ACTIVATION,
            expanded_channels=cfg.EXPANDED_CHANNELS,
            dropout=cfg.DROPOUT,
            classifier_widths=cfg.CLASSIFIER_WIDTHS,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def ablation_config(name, base):
    """
    Resolve 'full', a registry name or 'ablation-NAME' against base.

    Raises:
        ConfigError: unknown architecture name
    """
    if name == FULL_ARCHITECTURE:
        return base
    key = name[len('ablation-'):] if name.startswith('ablation-') else name
    if key not in ABLATIONS:
        raise ConfigError(
            f'unknown architecture {name!r}; expected {FULL_ARCHITECTURE!r} or one of '
            f'{", ".join("ablation-" + n for n in ABLATIONS)}'
        )
    return base.with_overrides(**ABLATIONS[key])


class AttentionNetwork:
    """Static feed-forward layer list ending in logits; softmax is applied on top."""

    def __init__(self, config, layers):
        self.config = config
        self.layers = layers
        self.probs = None

    @property
    def attention_layer(self):
        return next(layer for layer in self.layers if layer.kind == 'attention')

    def named_parameters(self):
        """(qualified name, parameter, gradient, trainable) in layer order."""
        for layer in self.layers:
            for key, value in layer.params.items():
                yield f'{layer.name}.{key}', value, layer.grads[key], layer.trainable

    def state_dict(self):
        return {name: value.copy() for name, value, _, _ in self.named_parameters()}

    def load_state_dict(self, state):
        expected = {name: value for name, value, _, _ in self.named_parameters()}
        missing = sorted(set(expected) - set(state))
        extra = sorted(set(state) - set(expected))
        if missing or extra:
            raise DimensionError(f'parameter names differ: missing {missing}, unexpected {extra}')
        for name, target in expected.items():
            source = np.asarray(state[name], dtype=np.float64)
            if source.shape != target.shape:
                raise DimensionError(f'{name}: expected shape {target.shape}, got {source.shape}')
            target[...] = source

    def parameter_count(self, trainable_only=False):
        return parameter_count(self.layers, trainable_only)

    def zero_grad(self):
        for layer in self.layers:
            layer.zero_grad()

    def _check_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        expected = (self.config.timesteps, self.config.channels)
        if x.ndim not in (2, 3) or x.shape[-2:] != expected:
            raise DimensionError(f'expected windows of shape {expected}, got {x.shape}')
        return x

    def _run(self, x, training, rng, stop_after=None):
        h = x
        for layer in self.layers:
            h = layer.forward(h, training=training, rng=rng)
            if not np.all(np.isfinite(h)):
                raise NumericError(f'non-finite values after layer {layer.name!r}', layer=layer.name)
            if layer is stop_after:
                break
        return h

    def forward(self, x, training=False, rng=None):
        """
        Class probabilities for a (T, C) window or an (N, T, C) batch.

        Raises:
            DimensionError: window shape differs from the config
            NumericError: a layer produced NaN or Inf
        """
        x = self._check_input(x)
        single = x.ndim == 2
        logits = self._run(x[None] if single else x, training, rng)
        self.probs = softmax_rows(logits)
        return self.probs[0] if single else self.probs

    def backward(self, grad_logits):
        """Backpropagate a logit gradient from the latest forward; returns grad wrt input."""
        grad = np.atleast_2d(grad_logits)
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def loss_and_grad(self, x, targets, gamma=2.0, training=False, rng=None):
        """Zero gradients, run forward and backward; returns (loss, clamped)."""
        self.zero_grad()
        probs = self.forward(x, training=training, rng=rng)
        loss, grad_logits, clamped = focal_loss(probs, targets, gamma)
        self.backward(grad_logits)
        return loss, clamped

    def predict(self, x):
        """Argmax class per window, lowest index on ties."""
        x = self._check_input(x)
        if x.ndim == 2:
            return int(np.argmax(self.forward(x)))
        out = np.empty(x.shape[0], dtype=np.int64)
        for start in range(0, x.shape[0], PREDICT_CHUNK):
            chunk = x[start:start + PREDICT_CHUNK]
            out[start:start + PREDICT_CHUNK] = np.argmax(self.forward(chunk), axis=1)
        return out

    def attention_maps(self, x):
        """alpha (C x T) per window at inference, (N, C, T) for a batch."""
        x = self._check_input(x)
        single = x.ndim == 2
        batch = x[None] if single else x
        layer = self.attention_layer
        maps = []
        for start in range(0, batch.shape[0], PREDICT_CHUNK):
            self._run(batch[start:start + PREDICT_CHUNK], False, None, stop_after=layer)
            maps.append(np.array(layer.last_alpha))
        alpha = np.concatenate(maps, axis=0) if maps else np.zeros((0, 0, 0))
        return alpha[0] if single else alpha


def _block(layers, prefix, layer, config, features):
    layers.append(layer)
    layers.append(Activation(f'{prefix}_act', config.activation))
    if config.layernorm:
        layers.append(LayerNorm(f'{prefix}_norm', features))


def build(config, seed):
    """Initialize every layer from one seeded generator, in layer order."""
    rng = np.random.default_rng(seed)
    layers = []
    width = config.channels

    if config.expansion in ('dense', 'frozen-dense'):
        width = config.expanded_channels
        dense = Dense('expansion', config.channels, width, rng, frozen=config.expansion == 'frozen-dense')
        _block(layers, 'expansion', dense, config, width)
    elif config.expansion == 'conv1d-k3':
        width = config.expanded_channels
        conv = Conv1D('expansion', config.channels, width, rng, kernel_size=config.conv_kernel)
        _block(layers, 'expansion', conv, config, width)

    if config.attention == 'channel':
        layers.append(ChannelAttention('attention', config.timesteps, rng, config.bias_per_timestep))
    elif config.attention == 'raffel':
        layers.append(RaffelAttention('attention', width, rng))
    else:
        layers.append(TemporalSum('attention'))
    if config.layernorm:
        layers.append(LayerNorm('attention_norm', width))

    for i, hidden in enumerate(config.hidden_widths, start=1):
        prefix = f'fc{i}'
        _block(layers, prefix, Dense(prefix, width, hidden, rng), config, hidden)
        layers.append(Dropout(f'{prefix}_dropout', config.dropout))
        width = hidden

    layers.append(Dense('output', width, config.num_classes, rng))
    network = AttentionNetwork(config, layers)
    logger.debug(
        'built %s/%s/%s network with %d parameters (%d trainable)',
        config.expansion, config.attention, config.classifier,
        network.parameter_count(), network.parameter_count(trainable_only=True),
    )
    return network


def forward(network, window, training=False, rng=None):
    return network.forward(window, training=training, rng=rng)


def backward(network, window, target, gamma=2.0, training=False, rng=None):
    """Populate gradients for one window or batch; returns the focal loss."""
    loss, _ = network.loss_and_grad(window, target, gamma, training=training, rng=rng)
    return loss


def predict(network, windows):
    return network.predict(windows)


def attention_maps(network, windows):
    return network.attention_maps(windows)
