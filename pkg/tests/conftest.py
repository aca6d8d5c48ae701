"""
Shared pytest fixtures.
"""

import os
import sys

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models import DatasetSpec  # noqa: E402
from nn import ModelConfig  # noqa: E402
from services import synth_recording  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def desk_spec():
    return DatasetSpec.from_preset('desk')


@pytest.fixture
def small_recording(desk_spec):
    """Four gestures, six repetitions, short segments."""
    return synth_recording(desk_spec, 4, 6, seed=7, gesture_ms=600.0, rest_ms=600.0)


@pytest.fixture
def toy_config():
    """6 x 4 windows, 3 classes, narrow classifier."""
    return ModelConfig(
        timesteps=6,
        channels=4,
        num_classes=3,
        expanded_channels=5,
        classifier_widths=(7, 6, 5),
        dropout=0.0,
    )
