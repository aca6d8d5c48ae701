"""
Recording Models

Contains the DatasetSpec describing a database layout and the Recording
holding one labeled multichannel sEMG stream.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from constants import DATASET_PRESETS, WINDOW_MS, OVERLAP_MS
from .base import ValidationError


def round_half_up(value):
    """Round to the nearest integer, halves away from zero for positives."""
    return int(math.floor(value + 0.5))


def ms_to_samples(ms, sample_rate_hz):
    """Convert a duration in milliseconds to a sample count."""
    return round_half_up(ms * sample_rate_hz / 1000.0)


@dataclass(frozen=True)
class DatasetSpec:
    """
    Layout of a database: label alphabet, channel geometry and windowing.

    num_classes counts rest, so NinaPro DB5/DB4 use 54.
    """
    num_classes: int = 54
    channels: int = 16
    sample_rate_hz: float = 200.0
    window_ms: float = WINDOW_MS
    overlap_ms: float = OVERLAP_MS
    imu_channels: int = 0
    max_repetition: Optional[int] = 6

    def __post_init__(self):
        if self.num_classes < 1:
            raise ValidationError(f'num_classes must be >= 1, got {self.num_classes}')
        if self.channels < 1:
            raise ValidationError(f'channels must be >= 1, got {self.channels}')
        if not self.sample_rate_hz > 0:
            raise ValidationError(f'sample_rate_hz must be > 0, got {self.sample_rate_hz}')
        if self.imu_channels < 0:
            raise ValidationError(f'imu_channels must be >= 0, got {self.imu_channels}')
        if not self.overlap_ms < self.window_ms:
            raise ValidationError(
                f'overlap_ms ({self.overlap_ms}) must be smaller than window_ms ({self.window_ms})'
            )
        if self.stride_samples < 1:
            raise ValidationError('window stride rounds to zero samples')

    @property
    def window_samples(self):
        return ms_to_samples(self.window_ms, self.sample_rate_hz)

    @property
    def stride_samples(self):
        return ms_to_samples(self.window_ms - self.overlap_ms, self.sample_rate_hz)

    @classmethod
    def from_preset(cls, name, **overrides):
        """Build a spec from a named preset in constants.DATASET_PRESETS."""
        if name not in DATASET_PRESETS:
            raise ValidationError(f'Unknown dataset preset: {name}')
        values = dict(DATASET_PRESETS[name])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_overrides(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True, eq=False)
class Recording:
    """
    One multichannel sEMG stream with per-sample labels.

    samples is T x C in normalized sensor units; gesture 0 is rest and
    repetition 0 is the rest buffer. imu, when present, is T x M. row_index
    holds each row's position in the stream it was cut from; None means
    the rows are that stream, in order.
    """
    samples: np.ndarray
    sample_rate_hz: float
    gesture: np.ndarray
    repetition: np.ndarray
    imu: Optional[np.ndarray] = None
    source: int = field(default=0)
    row_index: Optional[np.ndarray] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise ValidationError(f'samples must be 2-D, got shape {samples.shape}')
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'gesture', np.asarray(self.gesture, dtype=np.int64))
        object.__setattr__(self, 'repetition', np.asarray(self.repetition, dtype=np.int64))
        if self.imu is not None:
            object.__setattr__(self, 'imu', np.asarray(self.imu, dtype=np.float64))
        if self.row_index is not None:
            object.__setattr__(self, 'row_index', np.asarray(self.row_index, dtype=np.int64))
        self._check_shapes()

    def _check_shapes(self):
        rows = self.samples.shape[0]
        if self.samples.shape[1] < 1:
            raise ValidationError('Recording needs at least one channel')
        if not self.sample_rate_hz > 0:
            raise ValidationError(f'sample_rate_hz must be > 0, got {self.sample_rate_hz}')
        if self.gesture.shape != (rows,) or self.repetition.shape != (rows,):
            raise ValidationError(
                f'label rows ({self.gesture.shape[0]}, {self.repetition.shape[0]}) '
                f'do not match sample rows ({rows})'
            )
        if self.imu is not None and (self.imu.ndim != 2 or self.imu.shape[0] != rows):
            raise ValidationError(f'imu rows do not match sample rows ({rows})')
        if self.row_index is not None and self.row_index.shape != (rows,):
            raise ValidationError(f'row_index does not match sample rows ({rows})')

    @property
    def num_samples(self):
        return self.samples.shape[0]

    @property
    def channels(self):
        return self.samples.shape[1]

    @property
    def source_rows(self):
        """Position of every row in the original stream."""
        if self.row_index is None:
            return np.arange(self.num_samples, dtype=np.int64)
        return self.row_index

    def validate(self, spec):
        """
        Check label ranges and channel geometry against a DatasetSpec.

        Raises:
            ValidationError: naming the first offending row (0-based sample index)
        """
        if self.channels != spec.channels:
            raise ValidationError(
                f'expected {spec.channels} sEMG channels, found {self.channels}'
            )
        bad = np.flatnonzero((self.gesture < 0) | (self.gesture >= spec.num_classes))
        if bad.size:
            raise ValidationError(
                f'gesture label {self.gesture[bad[0]]} at sample {bad[0]} '
                f'outside [0, {spec.num_classes})'
            )
        out_of_range = self.repetition < 0
        if spec.max_repetition is not None:
            out_of_range |= self.repetition > spec.max_repetition
        bad = np.flatnonzero(out_of_range)
        if bad.size:
            raise ValidationError(
                f'repetition label {self.repetition[bad[0]]} at sample {bad[0]} out of range'
            )
        return self

    def combined(self, include_imu=True):
        """sEMG columns followed by IMU columns when present."""
        if include_imu and self.imu is not None:
            return np.hstack([self.samples, self.imu])
        return self.samples

    def take(self, rows):
        """New Recording holding the given row indices, in the given order."""
        rows = np.asarray(rows, dtype=np.int64)
        return Recording(
            samples=self.samples[rows],
            sample_rate_hz=self.sample_rate_hz,
            gesture=self.gesture[rows],
            repetition=self.repetition[rows],
            imu=None if self.imu is None else self.imu[rows],
            source=self.source,
            row_index=self.source_rows[rows],
        )

    def equals(self, other):
        """Bit-exact comparison of data and labels."""
        if (self.imu is None) != (other.imu is None):
            return False
        same_imu = self.imu is None or np.array_equal(self.imu, other.imu)
        return (
            self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.samples, other.samples)
            and np.array_equal(self.gesture, other.gesture)
            and np.array_equal(self.repetition, other.repetition)
            and same_imu
        )
