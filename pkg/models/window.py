"""
Window Models

Contains the Window (one fixed-length model input) and the WindowSet that
groups windows with their class histogram.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .base import ValidationError


@dataclass(frozen=True, eq=False)
class Window:
    """T x C slice of a recording labeled with the gesture of its first sample."""
    data: np.ndarray
    label: int
    source: int = 0
    start: int = 0

    @property
    def shape(self):
        return self.data.shape

    def with_data(self, data):
        return Window(data=data, label=self.label, source=self.source, start=self.start)


@dataclass(eq=False)
class WindowSet:
    """
    Ordered windows plus the label alphabet size.

    status is 'ok' or 'empty'; warnings collects human-readable notes from
    slicing (for example a recording shorter than one window).
    """
    windows: List[Window] = field(default_factory=list)
    num_classes: int = 1
    status: str = 'ok'
    warnings: List[str] = field(default_factory=list)

    def __len__(self):
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)

    @property
    def labels(self):
        return np.array([w.label for w in self.windows], dtype=np.int64)

    @property
    def class_counts(self):
        """Histogram over labels; always sums to len(self)."""
        counts = np.zeros(self.num_classes, dtype=np.int64)
        if self.windows:
            labels = self.labels
            if labels.min() < 0 or labels.max() >= self.num_classes:
                raise ValidationError(
                    f'window label outside [0, {self.num_classes})'
                )
            counts += np.bincount(labels, minlength=self.num_classes)
        return counts

    def stack(self):
        """Return (data, labels) with data shaped (N, T, C)."""
        if not self.windows:
            return np.zeros((0, 0, 0)), np.zeros(0, dtype=np.int64)
        data = np.stack([w.data for w in self.windows]).astype(np.float64, copy=False)
        return data, self.labels

    def subset(self, indices):
        return WindowSet(
            windows=[self.windows[i] for i in indices],
            num_classes=self.num_classes,
        )

    def extend(self, other):
        return WindowSet(
            windows=self.windows + list(other.windows),
            num_classes=max(self.num_classes, other.num_classes),
            status=self.status,
            warnings=self.warnings + list(other.warnings),
        )
