"""
Neural Network Package

Exports the differentiable layers, attention variants, focal loss and the
assembled attention network.
"""

from .layers import (
    Layer,
    Dense,
    Conv1D,
    LayerNorm,
    Activation,
    Dropout,
    dense_forward,
    conv1d_forward,
    layernorm_forward,
    mish,
    mish_grad,
    relu,
    tanh,
    softmax_rows,
    dropout,
    parameter_count,
)

from .attention import (
    AttentionParams,
    ChannelAttention,
    RaffelAttention,
    TemporalSum,
    attend,
    attend_raffel,
    attend_sum,
    attention_map,
)

from .losses import focal_loss

from .network import (
    ModelConfig,
    AttentionNetwork,
    ablation_config,
    build,
    forward,
    backward,
    predict,
    attention_maps,
)

from .gradcheck import numerical_gradient, relative_error, gradient_check

__all__ = [
    # Layers
    'Layer',
    'Dense',
    'Conv1D',
    'LayerNorm',
    'Activation',
    'Dropout',
    'dense_forward',
    'conv1d_forward',
    'layernorm_forward',
    'mish',
    'mish_grad',
    'relu',
    'tanh',
    'softmax_rows',
    'dropout',
    'parameter_count',
    # Attention
    'AttentionParams',
    'ChannelAttention',
    'RaffelAttention',
    'TemporalSum',
    'attend',
    'attend_raffel',
    'attend_sum',
    'attention_map',
    # Loss
    'focal_loss',
    # Network
    'ModelConfig',
    'AttentionNetwork',
    'ablation_config',
    'build',
    'forward',
    'backward',
    'predict',
    'attention_maps',
    # Gradient checks
    'numerical_gradient',
    'relative_error',
    'gradient_check',
]
