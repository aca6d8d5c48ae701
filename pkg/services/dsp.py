"""
Signal Preprocessing Service

Rectification, causal Butterworth high-pass filtering and moving-average
smoothing, applied in that order. Every operation works per channel on a
T x C matrix.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import signal

from constants import SMOOTHER_KERNELS, SMOOTHER_FALLBACK_MS
from models import DesignError, SizeError, ValidationError, Recording, round_half_up


@dataclass(frozen=True)
class FilterSpec:
    """High-pass Butterworth design parameters."""
    cutoff_hz: float = 20.0
    order: int = 4
    kind: str = 'highpass'

    def __post_init__(self):
        if not self.cutoff_hz > 0:
            raise DesignError(f'cutoff_hz must be positive, got {self.cutoff_hz}')
        if self.order < 1:
            raise DesignError(f'filter order must be >= 1, got {self.order}')
        if self.kind != 'highpass':
            raise DesignError(f'unsupported filter kind {self.kind!r}')


@dataclass(frozen=True)
class SmootherSpec:
    """Valid-mode moving average; output is kernel_len - 1 samples shorter."""
    kernel_len: int = 15
    mode: str = 'valid'

    def __post_init__(self):
        if self.kernel_len < 1:
            raise SizeError(f'kernel_len must be >= 1, got {self.kernel_len}')
        if self.mode != 'valid':
            raise ValidationError(f'unsupported smoothing mode {self.mode!r}')


@dataclass(frozen=True)
class PreprocessConfig:
    """Filter and smoother settings for the full chain."""
    filter: FilterSpec = field(default_factory=FilterSpec)
    smoother: SmootherSpec = field(default_factory=SmootherSpec)

    @classmethod
    def from_config(cls, cfg, sample_rate_hz, cutoff=None, order=None, kernel=None):
        """Resolve preset defaults and CLI overrides into a PreprocessConfig."""
        kernel = cfg.SMOOTHER_KERNEL if kernel is None else kernel
        return cls(
            filter=FilterSpec(
                cutoff_hz=cfg.FILTER_CUTOFF_HZ if cutoff is None else cutoff,
                order=cfg.FILTER_ORDER if order is None else order,
            ),
            smoother=SmootherSpec(kernel_len=resolve_kernel(kernel, sample_rate_hz)),
        )


def resolve_kernel(kernel, fs):
    """Map 'auto' to the per-rate kernel that yields 38 steps at 200 Hz and 381 at 2 kHz."""
    if kernel != 'auto':
        return int(kernel)
    rate = round_half_up(fs)
    if rate in SMOOTHER_KERNELS:
        return SMOOTHER_KERNELS[rate]
    return max(round_half_up(SMOOTHER_FALLBACK_MS * fs / 1000.0), 1)


def _as_matrix(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValidationError(f'expected a T x C matrix, got shape {x.shape}')
    return x


def rectify(x):
    """Elementwise absolute value."""
    return np.abs(_as_matrix(x))


def design_highpass(spec, fs):
    """
    Second-order sections of the bilinear-transform Butterworth high-pass.

    Raises:
        DesignError: cutoff at or above Nyquist
    """
    nyquist = fs / 2.0
    if spec.cutoff_hz >= nyquist:
        raise DesignError(f'cutoff {spec.cutoff_hz} Hz is not below Nyquist ({nyquist} Hz)')
    return signal.butter(spec.order, spec.cutoff_hz, btype='highpass', fs=fs, output='sos')


def butterworth_highpass(x, spec, fs):
    """Causal zero-state high-pass filtering of every channel."""
    x = _as_matrix(x)
    sos = design_highpass(spec, fs)
    if x.shape[0] < spec.order + 1:
        raise SizeError(f'need at least {spec.order + 1} samples to filter, got {x.shape[0]}')
    return signal.sosfilt(sos, x, axis=0)


def moving_average(x, spec):
    """Valid-mode moving average along time; output has T - kernel_len + 1 rows."""
    x = _as_matrix(x)
    if spec.kernel_len > x.shape[0]:
        raise SizeError(f'kernel of {spec.kernel_len} samples is longer than input ({x.shape[0]})')
    return sliding_window_view(x, spec.kernel_len, axis=0).mean(axis=-1)


def preprocess(x, fs, cfg):
    """moving_average(butterworth_highpass(rectify(x))); rectification must come first."""
    return moving_average(butterworth_highpass(rectify(x), cfg.filter, fs), cfg.smoother)


def preprocess_stream(recording, cfg, include_imu=True):
    """
    Preprocess a whole recording.

    Labels are re-aligned to the last sample of each smoothing kernel, the
    first sample at which the smoothed value is available.
    """
    data = preprocess(recording.combined(include_imu), recording.sample_rate_hz, cfg)
    shift = cfg.smoother.kernel_len - 1
    channels = recording.channels
    imu = None
    if include_imu and recording.imu is not None:
        imu = data[:, channels:]
    return Recording(
        samples=data[:, :channels],
        sample_rate_hz=recording.sample_rate_hz,
        gesture=recording.gesture[shift:],
        repetition=recording.repetition[shift:],
        imu=imu,
        source=recording.source,
        row_index=recording.source_rows[shift:],
    )


def preprocess_batch(windows, fs, cfg):
    """
    Apply preprocess independently to each window of an (N, T, C) array.

    Each window is filtered from zero state, exactly as if preprocess were
    called on it alone.
    """
    windows = np.asarray(windows, dtype=np.float64)
    if windows.ndim != 3:
        raise ValidationError(f'expected an N x T x C array, got shape {windows.shape}')
    length = windows.shape[1]
    if length < cfg.filter.order + 1:
        raise SizeError(f'need at least {cfg.filter.order + 1} samples to filter, got {length}')
    if cfg.smoother.kernel_len > length:
        raise SizeError(f'kernel of {cfg.smoother.kernel_len} samples is longer than input ({length})')
    filtered = signal.sosfilt(design_highpass(cfg.filter, fs), np.abs(windows), axis=1)
    return sliding_window_view(filtered, cfg.smoother.kernel_len, axis=1).mean(axis=-1)
