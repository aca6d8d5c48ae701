"""
Validation Constants

Whitelists for configuration enums and CLI choices, plus the magic numbers
of the binary file formats.
"""

# Model architecture choices
VALID_EXPANSIONS = {'dense', 'conv1d-k3', 'frozen-dense', 'none'}
VALID_ATTENTIONS = {'channel', 'raffel', 'temporal-sum'}
VALID_CLASSIFIERS = {'full', 'small', 'none'}
VALID_ACTIVATIONS = {'mish', 'relu'}

# Hidden layer widths per classifier choice
CLASSIFIER_WIDTHS = {
    'full': (500, 500, 2000),
    'small': (500,),
    'none': (),
}

# Naive predictors for reference metrics
VALID_BASELINES = ('weighted-random', 'unweighted-random', 'all-zeros', 'all-ones')

# CSV exchange format column names
LABEL_COLUMNS = ('gesture', 'repetition')
CHANNEL_PREFIX = 'ch'
IMU_PREFIX = 'imu'

# Binary formats
WINDOW_MAGIC = b'SEMGWIN1'
WINDOW_FORMAT_VERSION = 1
CHECKPOINT_MAGIC = b'SEMGCKPT'
CHECKPOINT_FORMAT_VERSION = 1

# Maximum heatmap size in pixels
MAX_HEATMAP_WIDTH = 4096
MAX_HEATMAP_HEIGHT = 4096
