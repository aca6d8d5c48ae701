"""
Model Checkpoints

Versioned binary file, little-endian:

    magic b'SEMGCKPT', uint16 version
    uint32 metadata length, UTF-8 JSON metadata (model config, epoch,
        optimizer step, training config, history)
    uint32 tensor count, then per tensor:
        uint16 name length, UTF-8 name, uint8 ndim, ndim x uint32 dims,
        float64 values in row-major order

Network parameters come first in layer order; optimizer slots follow under
the 'opt/' prefix.
"""

import json
import logging
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from constants import CHECKPOINT_MAGIC, CHECKPOINT_FORMAT_VERSION
from models import FormatError, SemgError
from nn import ModelConfig, build
from services.training import OptState

logger = logging.getLogger(__name__)

OPT_PREFIX = 'opt/'


class CheckpointError(FormatError):
    """Raised when a checkpoint cannot be read or does not match its network."""
    pass


@dataclass
class Checkpoint:
    network: object
    state: Optional[OptState]
    epoch: Optional[int]
    meta: dict


def _pack_tensor(name, value):
    encoded = name.encode('utf-8')
    value = np.ascontiguousarray(value, dtype='<f8')
    head = struct.pack('<H', len(encoded)) + encoded + struct.pack('<B', value.ndim)
    head += struct.pack(f'<{value.ndim}I', *value.shape)
    return head + value.tobytes()


def encode_checkpoint(network, state=None, epoch=None, meta=None):
    tensors = list(network.state_dict().items())
    metadata = dict(meta or {})
    metadata['model'] = network.config.to_dict()
    metadata['epoch'] = epoch
    metadata['opt_step'] = None
    if state is not None:
        metadata['opt_step'] = state.step
        tensors += [(OPT_PREFIX + key, value) for key, value in state.arrays().items()]
    encoded_meta = json.dumps(metadata, sort_keys=True).encode('utf-8')
    parts = [
        CHECKPOINT_MAGIC,
        struct.pack('<H', CHECKPOINT_FORMAT_VERSION),
        struct.pack('<I', len(encoded_meta)),
        encoded_meta,
        struct.pack('<I', len(tensors)),
    ]
    parts.extend(_pack_tensor(name, value) for name, value in tensors)
    return b''.join(parts)


class _Reader:
    def __init__(self, payload, path):
        self.payload = payload
        self.offset = 0
        self.path = path

    def take(self, size):
        if self.offset + size > len(self.payload):
            raise CheckpointError('checkpoint is truncated', path=self.path)
        chunk = self.payload[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_checkpoint(payload, path=None):
    reader = _Reader(payload, path)
    if reader.take(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
        raise CheckpointError('bad magic; not a checkpoint file', path=path)
    (version,) = reader.unpack('<H')
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(f'unsupported checkpoint version {version}', path=path)
    (meta_len,) = reader.unpack('<I')
    try:
        meta = json.loads(reader.take(meta_len).decode('utf-8'))
    except ValueError as e:
        raise CheckpointError(f'corrupt checkpoint metadata: {e}', path=path)

    (count,) = reader.unpack('<I')
    tensors = {}
    for _ in range(count):
        (name_len,) = reader.unpack('<H')
        name = reader.take(name_len).decode('utf-8')
        (ndim,) = reader.unpack('<B')
        shape = reader.unpack(f'<{ndim}I') if ndim else ()
        size = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(reader.take(8 * size), dtype='<f8').astype(np.float64)
        tensors[name] = values.reshape(shape)
    if reader.offset != len(payload):
        raise CheckpointError('trailing bytes after the last tensor', path=path)

    try:
        network = build(ModelConfig.from_dict(meta['model']), seed=0)
        network.load_state_dict({k: v for k, v in tensors.items() if not k.startswith(OPT_PREFIX)})
    except (KeyError, TypeError) as e:
        raise CheckpointError(f'checkpoint metadata is incomplete: {e}', path=path)
    except SemgError as e:
        raise CheckpointError(f'checkpoint does not match its model config: {e.message}', path=path)

    state = None
    if meta.get('opt_step') is not None:
        state = OptState.from_arrays(
            meta['opt_step'],
            {k[len(OPT_PREFIX):]: v for k, v in tensors.items() if k.startswith(OPT_PREFIX)},
        )
    return Checkpoint(network=network, state=state, epoch=meta.get('epoch'), meta=meta)


def save_checkpoint(path, network, state=None, epoch=None, meta=None):
    with open(path, 'wb') as f:
        f.write(encode_checkpoint(network, state, epoch, meta))
    logger.debug('wrote checkpoint %s (epoch %s)', path, epoch)


def load_checkpoint(path):
    try:
        with open(path, 'rb') as f:
            payload = f.read()
    except OSError as e:
        raise CheckpointError(f'cannot read checkpoint: {e.strerror}', path=path)
    return decode_checkpoint(payload, path=path)
