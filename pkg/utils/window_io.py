"""
Window Record Files

Length-prefixed binary records, little-endian throughout:

    header: magic b'SEMGWIN1', uint16 version, uint32 num_classes, uint32 count
    record: uint32 body length, then the body
    body:   uint32 T, uint32 C, int32 label, uint32 source, uint64 start,
            T*C float32 samples in row-major (time-major) order
"""

import struct

import numpy as np

from constants import WINDOW_MAGIC, WINDOW_FORMAT_VERSION
from models import FormatError, Window, WindowSet

HEADER = struct.Struct('<8sHII')
LENGTH = struct.Struct('<I')
RECORD = struct.Struct('<IIiIQ')


class WindowFormatError(FormatError):
    """Raised when a window file is truncated, corrupt or of another version."""
    pass


def encode_windows(window_set):
    parts = [HEADER.pack(WINDOW_MAGIC, WINDOW_FORMAT_VERSION, window_set.num_classes, len(window_set))]
    for window in window_set:
        steps, channels = window.shape
        samples = np.ascontiguousarray(window.data, dtype='<f4').tobytes()
        body = RECORD.pack(steps, channels, window.label, window.source, window.start) + samples
        parts.append(LENGTH.pack(len(body)))
        parts.append(body)
    return b''.join(parts)


def decode_windows(payload, path=None):
    """Parse a window file's bytes into a WindowSet (float64 data)."""
    if len(payload) < HEADER.size:
        raise WindowFormatError('file is shorter than the window header', path=path)
    magic, version, num_classes, count = HEADER.unpack_from(payload, 0)
    if magic != WINDOW_MAGIC:
        raise WindowFormatError(f'bad magic {magic!r}; not a window file', path=path)
    if version != WINDOW_FORMAT_VERSION:
        raise WindowFormatError(f'unsupported window format version {version}', path=path)

    offset = HEADER.size
    windows = []
    for index in range(count):
        if offset + LENGTH.size > len(payload):
            raise WindowFormatError(f'truncated before record {index}', path=path)
        (length,) = LENGTH.unpack_from(payload, offset)
        offset += LENGTH.size
        if length < RECORD.size or offset + length > len(payload):
            raise WindowFormatError(f'record {index} is truncated', path=path)
        steps, channels, label, source, start = RECORD.unpack_from(payload, offset)
        expected = RECORD.size + 4 * steps * channels
        if length != expected:
            raise WindowFormatError(
                f'record {index} holds {length} bytes, expected {expected} for {steps}x{channels}',
                path=path,
            )
        data = np.frombuffer(payload, dtype='<f4', count=steps * channels, offset=offset + RECORD.size)
        windows.append(Window(
            data=data.reshape(steps, channels).astype(np.float64),
            label=label,
            source=source,
            start=start,
        ))
        offset += length
    if offset != len(payload):
        raise WindowFormatError(f'{len(payload) - offset} trailing bytes after {count} records', path=path)
    return WindowSet(windows=windows, num_classes=num_classes, status='ok' if windows else 'empty')


def write_windows(window_set, path):
    with open(path, 'wb') as f:
        f.write(encode_windows(window_set))


def read_windows(path):
    try:
        with open(path, 'rb') as f:
            payload = f.read()
    except OSError as e:
        raise WindowFormatError(f'cannot read window file: {e.strerror}', path=path)
    return decode_windows(payload, path=path)
