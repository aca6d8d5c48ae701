"""
Dataset Constants

Recording layouts for the supported sEMG databases, the NinaPro gesture
groups, and the smoothing kernels that bring 52 and 520 sample windows down to 38 and 381 steps.
"""

# Label used for rest in every supported database
REST_LABEL = 0

# NinaPro-style presets (sample rate in Hz, sEMG channel count)
DATASET_PRESETS = {
    'db5': {
        'sample_rate_hz': 200.0,
        'channels': 16,
        'imu_channels': 3,
        'num_classes': 54,
        'max_repetition': 6,
    },
    'db4': {
        'sample_rate_hz': 2000.0,
        'channels': 12,
        'imu_channels': 0,
        'num_classes': 54,
        'max_repetition': 6,
    },
    'desk': {
        'sample_rate_hz': 200.0,
        'channels': 16,
        'imu_channels': 0,
        'num_classes': 5,
        'max_repetition': None,
    },
}

# Window geometry shared by all presets
WINDOW_MS = 260.0
OVERLAP_MS = 235.0

# Smoothing kernel per sample rate: 52 -> 38 at 200 Hz, 520 -> 381 at 2 kHz
SMOOTHER_KERNELS = {
    200: 15,
    2000: 140,
}

# Fallback smoothing span for other sample rates
SMOOTHER_FALLBACK_MS = 75.0

# NinaPro exercise groups (inclusive label ranges)
GESTURE_GROUPS = {
    'finger': range(1, 13),
    'wrist': range(13, 30),
    'functional': range(30, 53),
}

# Repetitions used for tuning and holdout
VAL_REPETITION = 3
TEST_REPETITION = 5
