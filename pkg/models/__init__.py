"""
Models Package

Exports the data records and the error hierarchy used throughout the toolchain.
"""

from .base import (
    SemgError,
    ValidationError,
    FormatError,
    ParseError,
    DimensionError,
    SizeError,
    DesignError,
    NumericError,
    ConfigError,
)

from .recording import DatasetSpec, Recording, round_half_up, ms_to_samples
from .window import Window, WindowSet
from .manifest import RunManifest

__all__ = [
    'SemgError',
    'ValidationError',
    'FormatError',
    'ParseError',
    'DimensionError',
    'SizeError',
    'DesignError',
    'NumericError',
    'ConfigError',
    'DatasetSpec',
    'Recording',
    'round_half_up',
    'ms_to_samples',
    'Window',
    'WindowSet',
    'RunManifest',
]
