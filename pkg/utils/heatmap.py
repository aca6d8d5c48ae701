"""
Attention Heatmap Export

Writes alpha matrices (channels x time) as CSV tables and, when Pillow is
installed, as PNG images with one enlarged pixel block per cell.
"""

import numpy as np
import pandas as pd

from constants import MAX_HEATMAP_WIDTH, MAX_HEATMAP_HEIGHT
from models import FormatError

try:
    from PIL import Image
    PIL_AVAILABLE = True
except ImportError:
    PIL_AVAILABLE = False


class HeatmapError(FormatError):
    """Raised when a heatmap cannot be rendered."""
    pass


# Low and high colors of the ramp (dark blue to yellow)
LOW_COLOR = np.array([20, 24, 82], dtype=np.float64)
HIGH_COLOR = np.array([250, 230, 40], dtype=np.float64)


def write_attention_csv(alpha, path):
    """One row per channel, one column per time step."""
    alpha = np.asarray(alpha, dtype=np.float64)
    frame = pd.DataFrame(
        alpha,
        index=pd.Index([f'ch{c}' for c in range(alpha.shape[0])], name='channel'),
        columns=[f't{t}' for t in range(alpha.shape[1])],
    )
    frame.to_csv(path, float_format='%.17g', lineterminator='\n')


def render_heatmap(alpha, scale=8):
    """
    Map alpha to an RGB image, each row min-max scaled independently.

    Raises:
        HeatmapError: Pillow missing, bad shape or oversized image
    """
    if not PIL_AVAILABLE:
        raise HeatmapError('Pillow is not installed; cannot render PNG heatmaps')
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim != 2 or alpha.size == 0:
        raise HeatmapError(f'expected a non-empty channels x time matrix, got shape {alpha.shape}')
    height, width = alpha.shape[0] * scale, alpha.shape[1] * scale
    if width > MAX_HEATMAP_WIDTH or height > MAX_HEATMAP_HEIGHT:
        raise HeatmapError(
            f'heatmap dimensions too large: {width}x{height}. '
            f'Maximum: {MAX_HEATMAP_WIDTH}x{MAX_HEATMAP_HEIGHT}'
        )

    low = alpha.min(axis=1, keepdims=True)
    span = alpha.max(axis=1, keepdims=True) - low
    level = np.divide(alpha - low, span, out=np.zeros_like(alpha), where=span > 0)
    pixels = LOW_COLOR + level[..., None] * (HIGH_COLOR - LOW_COLOR)
    pixels = np.repeat(np.repeat(pixels, scale, axis=0), scale, axis=1)
    return Image.fromarray(np.round(pixels).astype(np.uint8))


def write_attention_png(alpha, path, scale=8):
    render_heatmap(alpha, scale).save(path, 'PNG', optimize=True)
