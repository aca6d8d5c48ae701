"""
Constants Package

Exports all constants used throughout the toolchain.
"""

from .datasets import (
    REST_LABEL,
    DATASET_PRESETS,
    WINDOW_MS,
    OVERLAP_MS,
    SMOOTHER_KERNELS,
    SMOOTHER_FALLBACK_MS,
    GESTURE_GROUPS,
    VAL_REPETITION,
    TEST_REPETITION,
)

from .validation import (
    VALID_EXPANSIONS,
    VALID_ATTENTIONS,
    VALID_CLASSIFIERS,
    VALID_ACTIVATIONS,
    CLASSIFIER_WIDTHS,
    VALID_BASELINES,
    LABEL_COLUMNS,
    CHANNEL_PREFIX,
    IMU_PREFIX,
    WINDOW_MAGIC,
    WINDOW_FORMAT_VERSION,
    CHECKPOINT_MAGIC,
    CHECKPOINT_FORMAT_VERSION,
    MAX_HEATMAP_WIDTH,
    MAX_HEATMAP_HEIGHT,
)

from .ablations import (
    FULL_ARCHITECTURE,
    ABLATIONS,
    ABLATION_SUITES,
)

__all__ = [
    # Datasets
    'REST_LABEL',
    'DATASET_PRESETS',
    'WINDOW_MS',
    'OVERLAP_MS',
    'SMOOTHER_KERNELS',
    'SMOOTHER_FALLBACK_MS',
    'GESTURE_GROUPS',
    'VAL_REPETITION',
    'TEST_REPETITION',
    # Validation
    'VALID_EXPANSIONS',
    'VALID_ATTENTIONS',
    'VALID_CLASSIFIERS',
    'VALID_ACTIVATIONS',
    'CLASSIFIER_WIDTHS',
    'VALID_BASELINES',
    'LABEL_COLUMNS',
    'CHANNEL_PREFIX',
    'IMU_PREFIX',
    'WINDOW_MAGIC',
    'WINDOW_FORMAT_VERSION',
    'CHECKPOINT_MAGIC',
    'CHECKPOINT_FORMAT_VERSION',
    'MAX_HEATMAP_WIDTH',
    'MAX_HEATMAP_HEIGHT',
    # Ablations
    'FULL_ARCHITECTURE',
    'ABLATIONS',
    'ABLATION_SUITES',
]
