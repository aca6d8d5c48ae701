"""
Windowing Service

Functions for cutting recordings into overlapping fixed-length windows and
preprocessing each window.
"""

import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from constants import WINDOW_MS, OVERLAP_MS
from models import Window, WindowSet, ms_to_samples
from .dsp import preprocess_batch

logger = logging.getLogger(__name__)


def window_starts(num_samples, window, stride):
    """Start indices of every full-length window; the short tail is dropped."""
    if num_samples < window:
        return np.zeros(0, dtype=np.int64)
    return np.arange(0, num_samples - window + 1, stride, dtype=np.int64)


def _spans_multiple_repetitions(repetition, starts, window):
    """True where a window holds more than one distinct non-zero repetition label."""
    views = sliding_window_view(repetition, window)[starts]
    active = views > 0
    high = np.where(active, views, np.iinfo(np.int64).min).max(axis=1)
    low = np.where(active, views, np.iinfo(np.int64).max).min(axis=1)
    return active.any(axis=1) & (high != low)


def _crosses_gap(source_rows, starts, window):
    """True where a window's rows are not consecutive in the original stream."""
    steps = np.diff(source_rows) != 1
    # gaps[i] counts breaks between rows 0..i
    gaps = np.r_[0, np.cumsum(steps)]
    return gaps[starts + window - 1] != gaps[starts]


def slice_windows(recording, window_ms=WINDOW_MS, overlap_ms=OVERLAP_MS,
                  num_classes=None, include_imu=False):
    """
    Cut a recording into raw windows.

    Windows that contain more than one repetition are discarded, as are
    windows whose rows are not consecutive in the original stream (a split
    or gesture subset joins rows that were never adjacent). A window that
    contains several gestures takes the gesture of its first sample.

    Returns:
        WindowSet ordered by start index, where start is the source row of
        the first sample; status 'empty' with a warning when the recording
        is shorter than one window
    """
    fs = recording.sample_rate_hz
    window = ms_to_samples(window_ms, fs)
    stride = ms_to_samples(window_ms - overlap_ms, fs)
    if num_classes is None:
        num_classes = int(recording.gesture.max()) + 1 if recording.num_samples else 1

    if recording.num_samples < window:
        message = (
            f'recording of {recording.num_samples} samples is shorter than one '
            f'{window}-sample window'
        )
        logger.warning(message)
        return WindowSet(num_classes=num_classes, status='empty', warnings=[message])

    data = recording.combined(include_imu)
    starts = window_starts(recording.num_samples, window, stride)
    source_rows = recording.source_rows
    mixed = _spans_multiple_repetitions(recording.repetition, starts, window)
    stitched = _crosses_gap(source_rows, starts, window)
    kept = starts[~(mixed | stitched)]
    if mixed.any():
        logger.debug('discarded %d windows spanning multiple repetitions', int(mixed.sum()))
    if stitched.any():
        logger.debug('discarded %d windows crossing a gap in the source rows', int((stitched & ~mixed).sum()))

    windows = [
        Window(
            data=data[start:start + window],
            label=int(recording.gesture[start]),
            source=recording.source,
            start=int(source_rows[start]),
        )
        for start in kept
    ]
    return WindowSet(windows=windows, num_classes=num_classes)


def class_histogram(window_set):
    """Exact window count per label."""
    return window_set.class_counts


def preprocess_windows(window_set, fs, cfg):
    """Run the rectify / high-pass / smooth chain on every window independently."""
    if not len(window_set):
        return WindowSet(
            num_classes=window_set.num_classes,
            status=window_set.status,
            warnings=list(window_set.warnings),
        )
    data, _ = window_set.stack()
    processed = preprocess_batch(data, fs, cfg)
    windows = [w.with_data(processed[i]) for i, w in enumerate(window_set.windows)]
    return WindowSet(
        windows=windows,
        num_classes=window_set.num_classes,
        status=window_set.status,
        warnings=list(window_set.warnings),
    )


def build_windows(recording, spec, cfg, include_imu=False, raw=False):
    """Slice raw windows with the dataset geometry, then preprocess each one."""
    window_set = slice_windows(
        recording,
        window_ms=spec.window_ms,
        overlap_ms=spec.overlap_ms,
        num_classes=spec.num_classes,
        include_imu=include_imu,
    )
    if raw:
        return window_set
    return preprocess_windows(window_set, recording.sample_rate_hz, cfg)
