"""
Application Configuration

Centralizes dataset, preprocessing, model and training defaults for every
preset. Environment variables select the preset and cap worker threads.
"""

import os

# Base directory of the toolchain
BASE_DIR = os.path.dirname(os.path.abspath(__file__))


class Config:
    """Base configuration class (NinaPro DB5 geometry)."""

    CODE_VERSION = '1.0.0'

    # Runtime settings
    LOG_LEVEL = os.environ.get('SEMG_LOG_LEVEL', 'INFO')
    THREADS = int(os.environ.get('SEMG_THREADS', '0') or 0) or (os.cpu_count() or 1)

    # Dataset settings
    PRESET = 'db5'
    WINDOW_MS = 260.0
    OVERLAP_MS = 235.0

    # Preprocessing settings
    FILTER_CUTOFF_HZ = 20.0
    FILTER_ORDER = 4
    SMOOTHER_KERNEL = 'auto'

    # Augmentation settings
    SNR_MIN_DB = 1
    SNR_MAX_DB = 30
    CORRECTED_SNR = False
    AUGMENT_EXTRA_COPIES = 0

    # Model settings
    EXPANSION = 'dense'
    ATTENTION = 'channel'
    CLASSIFIER = 'full'
    ACTIVATION = 'mish'
    LAYERNORM = True
    EXPANDED_CHANNELS = 128
    CLASSIFIER_WIDTHS = None
    DROPOUT = 0.36

    # Training settings
    EPOCHS = 55
    BATCH_SIZE = 128
    LR_START = 1e-3
    LR_END = 1e-5
    WARM_EPOCHS = 5
    FOCAL_GAMMA = 2.0
    RADAM_BETAS = (0.9, 0.999)
    RADAM_EPS = 1e-8
    LOOKAHEAD_K = 6
    LOOKAHEAD_ALPHA = 0.5


class DB5Config(Config):
    """NinaPro DB5 (double MYO, 200 Hz)."""
    PRESET = 'db5'


class DB4Config(Config):
    """NinaPro DB4 (Cometa, 2 kHz)."""
    PRESET = 'db4'


class DeskConfig(Config):
    """Synthetic desk-scale runs."""
    PRESET = 'desk'
    EXPANDED_CHANNELS = 32
    CORRECTED_SNR = True


class TestingConfig(Config):
    """Testing configuration."""
    PRESET = 'desk'
    EXPANDED_CHANNELS = 8
    CLASSIFIER_WIDTHS = (32, 32, 64)
    EPOCHS = 3
    BATCH_SIZE = 32
    WARM_EPOCHS = 1
    CORRECTED_SNR = True


# Configuration dictionary for easy access
config = {
    'db5': DB5Config,
    'db4': DB4Config,
    'desk': DeskConfig,
    'testing': TestingConfig,
    'default': DB5Config
}


def get_config(env=None):
    """Get configuration based on environment."""
    if env is None:
        env = os.environ.get('SEMG_ENV', 'db5')
    return config.get(env, config['default'])
