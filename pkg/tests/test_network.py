"""
Tests for model assembly, ablation variants and whole-network gradients.
"""

import numpy as np
import pytest

from config import get_config
from constants import ABLATIONS
from models import ConfigError, DimensionError, NumericError
from nn import ModelConfig, ablation_config, backward, build, focal_loss, forward, gradient_check, predict


def full_config(**overrides):
    return ModelConfig(timesteps=38, channels=16, num_classes=54, **overrides)


def test_full_parameter_count():
    """Full architecture on 38 x 16 windows with 54 classes."""
    count = build(full_config(), seed=0).parameter_count()
    assert count == 1435187
    assert abs(count - 1.44e6) / 1.44e6 < 0.03


@pytest.mark.parametrize('name, expected', [
    ('conv1d', 1439283),
    ('no-expansion', 1376531),
    ('small-classifier', 96687),
    ('no-classifier', 11099),
    ('no-layernorm', 1428675),
    ('relu', 1435187),
    ('temporal-sum', 1433742),
    ('raffel-attention', 1433871),
])
def test_ablation_parameter_counts(name, expected):
    config = ablation_config(name, full_config())
    assert build(config, seed=0).parameter_count() == expected


def test_no_classifier_is_order_ten_thousand():
    count = build(ablation_config('no-classifier', full_config()), seed=0).parameter_count()
    assert 1e4 < count < 2e4


def test_frozen_expansion_is_not_trainable():
    network = build(ablation_config('ablation-frozen-fc', full_config()), seed=0)
    assert network.parameter_count() == 1435187
    assert network.parameter_count(trainable_only=True) == 1435187 - (16 * 128 + 128)


def test_every_registry_entry_builds(toy_config):
    for name in ABLATIONS:
        network = build(ablation_config(name, toy_config), seed=1)
        probs = network.forward(np.zeros((2, 6, 4)))
        assert probs.shape == (2, 3)


def test_unknown_architecture(toy_config):
    with pytest.raises(ConfigError):
        ablation_config('ablation-wavelets', toy_config)


def test_invalid_config_values():
    with pytest.raises(ConfigError):
        ModelConfig(timesteps=6, channels=4, num_classes=3, attention='multihead')
    with pytest.raises(ConfigError):
        ModelConfig(timesteps=6, channels=4, num_classes=3, expanded_channels=0)
    with pytest.raises(ConfigError):
        ModelConfig(timesteps=6, channels=4, num_classes=3, classifier_widths=(4, 4))


def test_same_seed_same_parameters(toy_config):
    a = build(toy_config, seed=3).state_dict()
    b = build(toy_config, seed=3).state_dict()
    c = build(toy_config, seed=4).state_dict()
    assert all(np.array_equal(a[k], b[k]) for k in a)
    assert any(not np.array_equal(a[k], c[k]) for k in a)


def test_forward_outputs_distribution(rng):
    network = build(full_config(), seed=0)
    probs = forward(network, rng.standard_normal((38, 16)))
    assert probs.shape == (54,)
    assert abs(probs.sum() - 1.0) < 1e-12


def test_inference_is_deterministic(rng, toy_config):
    network = build(toy_config.with_overrides(dropout=0.36), seed=0)
    x = rng.standard_normal((4, 6, 4))
    assert np.array_equal(network.forward(x), network.forward(x))


def test_dropout_only_in_training(rng, toy_config):
    network = build(toy_config.with_overrides(dropout=0.5), seed=0)
    x = rng.standard_normal((4, 6, 4))
    train_a = network.forward(x, training=True, rng=np.random.default_rng(1))
    train_b = network.forward(x, training=True, rng=np.random.default_rng(2))
    assert not np.array_equal(train_a, train_b)


def test_no_expansion_context_has_input_width(rng):
    config = ModelConfig(timesteps=6, channels=4, num_classes=3, expansion='none', classifier='none')
    network = build(config, seed=0)
    assert network.layers[0].kind == 'attention'
    assert network.layers[-1].params['W'].shape == (4, 3)
    assert network.forward(rng.standard_normal((6, 4))).shape == (3,)


def test_wrong_window_shape(toy_config):
    network = build(toy_config, seed=0)
    with pytest.raises(DimensionError):
        network.forward(np.zeros((5, 4)))


def test_nan_names_the_layer(toy_config):
    network = build(toy_config, seed=0)
    network.layers[0].params['W'][0, 0] = np.nan
    with pytest.raises(NumericError) as info:
        network.forward(np.ones((6, 4)))
    assert info.value.layer == 'expansion'


@pytest.mark.parametrize('arch', ['full', 'conv1d', 'raffel-attention', 'temporal-sum', 'no-layernorm', 'relu'])
def test_full_model_gradient_check(arch, toy_config):
    """Every parameter gradient agrees with central differences."""
    network = build(ablation_config(arch, toy_config), seed=5)
    rng = np.random.default_rng(6)
    x = rng.standard_normal((4, 6, 4))
    y = np.array([0, 1, 2, 1])

    def loss():
        return focal_loss(network.forward(x), y, 2.0)[0]

    backward(network, x, y, gamma=2.0)
    analytic = {name: grad.copy() for name, _, grad, _ in network.named_parameters()}
    for name, param, _, _ in network.named_parameters():
        assert gradient_check(loss, param, analytic[name]) < 1e-3, name


def test_frozen_expansion_gets_zero_gradient(rng, toy_config):
    network = build(toy_config.with_overrides(expansion='frozen-dense'), seed=0)
    backward(network, rng.standard_normal((3, 6, 4)), np.array([0, 1, 2]))
    assert not network.layers[0].grads['W'].any()
    assert not network.layers[0].grads['b'].any()


def test_gradient_descent_overfits_one_batch(rng, toy_config):
    network = build(toy_config, seed=0)
    x = rng.standard_normal((8, 6, 4))
    y = np.array([0, 1, 2, 0, 1, 2, 0, 1])
    losses = []
    for _ in range(50):
        losses.append(backward(network, x, y, gamma=2.0))
        for _, param, grad, trainable in network.named_parameters():
            if trainable:
                param -= 0.1 * grad
    assert losses[-1] < losses[0]


def test_predict_ties_pick_lowest_index(toy_config):
    network = build(toy_config, seed=0)
    out = network.layers[-1]
    out.params['W'][...] = 0.0
    out.params['b'][...] = 0.0
    assert predict(network, np.ones((6, 4))) == 0
    assert predict(network, np.ones((3, 6, 4))).tolist() == [0, 0, 0]


def test_attention_maps_shape(rng, toy_config):
    network = build(toy_config, seed=0)
    maps = network.attention_maps(rng.standard_normal((3, 6, 4)))
    assert maps.shape == (3, 5, 6)
    assert np.allclose(maps.sum(axis=2), 1.0)


def test_from_config_uses_preset():
    config = ModelConfig.from_config(get_config('testing'), 38, 16, 5)
    assert config.expanded_channels == 8
    assert config.hidden_widths == (32, 32, 64)
    assert ablation_config('small-classifier', config).hidden_widths == (32,)


def test_config_dict_round_trip(toy_config):
    assert ModelConfig.from_dict(toy_config.to_dict()) == toy_config
