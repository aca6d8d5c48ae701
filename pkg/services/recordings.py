"""
Recording Service

Functions for reading and writing the CSV exchange format, generating
synthetic recordings, and splitting recordings by repetition.
"""

import logging
import re

import numpy as np
import pandas as pd
from pandas.api.types import is_numeric_dtype
from scipy import signal

from constants import CHANNEL_PREFIX, IMU_PREFIX, LABEL_COLUMNS, GESTURE_GROUPS, REST_LABEL
from models import Recording, ValidationError, FormatError, ParseError, ms_to_samples

logger = logging.getLogger(__name__)

_CHANNEL_RE = re.compile(rf'^{CHANNEL_PREFIX}(\d+)$')
_IMU_RE = re.compile(rf'^{IMU_PREFIX}(\d+)$')


# =========== CSV EXCHANGE FORMAT ===========

def _parse_header(columns, path):
    """Return (sEMG channel count, IMU channel count) for a valid header."""
    columns = [str(c).strip() for c in columns]
    if tuple(columns[-2:]) != LABEL_COLUMNS:
        raise FormatError(
            f'header must end with {",".join(LABEL_COLUMNS)}, got {",".join(columns[-2:])}',
            path=path,
        )
    data_columns = columns[:-2]
    channels = 0
    while channels < len(data_columns):
        match = _CHANNEL_RE.match(data_columns[channels])
        if not match:
            break
        if int(match.group(1)) != channels:
            raise FormatError(f'channel column {data_columns[channels]} out of order', path=path)
        channels += 1
    if channels == 0:
        raise FormatError('header has no ch0 column', path=path)

    imu = 0
    for name in data_columns[channels:]:
        match = _IMU_RE.match(name)
        if not match or int(match.group(1)) != imu:
            raise FormatError(f'unexpected header column {name!r}', path=path)
        imu += 1
    return channels, imu


def _check_column(frame, column, path, integral=False):
    """Raise ParseError at the first non-numeric, missing or non-finite cell."""
    values = frame[column]
    if values.empty:
        return np.zeros(0)
    if not is_numeric_dtype(values):
        coerced = pd.to_numeric(values, errors='coerce')
        bad = int(np.flatnonzero(coerced.isna().to_numpy())[0])
        raise ParseError(
            f'non-numeric value {values.iloc[bad]!r} in column {column}',
            row=bad + 2, path=path,
        )
    array = values.to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(array))
    if bad.size:
        raise ParseError(f'missing or non-finite value in column {column}', row=int(bad[0]) + 2, path=path)
    if integral:
        bad = np.flatnonzero(array != np.round(array))
        if bad.size:
            raise ParseError(f'non-integer label in column {column}', row=int(bad[0]) + 2, path=path)
    return array


def load_csv(path, spec):
    """
    Load a recording from the CSV exchange format.

    Args:
        path: CSV file with header ch0..chN[,imu0..imuM],gesture,repetition
        spec: DatasetSpec supplying sample rate, channel count and label ranges

    Returns:
        Recording with rows in file order

    Raises:
        FormatError: malformed header or unreadable file
        ParseError: non-numeric cell (row is the 1-based file line)
        ValidationError: label out of range or channel count mismatch
    """
    try:
        frame = pd.read_csv(path, float_precision='round_trip', encoding='utf-8')
    except FileNotFoundError:
        raise FormatError(f'file not found: {path}', path=path)
    except pd.errors.EmptyDataError:
        raise FormatError('file is empty', path=path)
    except pd.errors.ParserError as e:
        raise ParseError(f'malformed CSV: {e}', path=path)

    channels, imu_channels = _parse_header(frame.columns, path)
    frame.columns = [str(c).strip() for c in frame.columns]
    names = list(frame.columns)

    samples = np.column_stack(
        [_check_column(frame, name, path) for name in names[:channels]]
    ) if len(frame) else np.zeros((0, channels))
    imu = None
    if imu_channels:
        imu = np.column_stack(
            [_check_column(frame, name, path) for name in names[channels:channels + imu_channels]]
        ) if len(frame) else np.zeros((0, imu_channels))
    gesture = _check_column(frame, 'gesture', path, integral=True).astype(np.int64)
    repetition = _check_column(frame, 'repetition', path, integral=True).astype(np.int64)

    recording = Recording(
        samples=samples,
        sample_rate_hz=spec.sample_rate_hz,
        gesture=gesture,
        repetition=repetition,
        imu=imu,
    )
    try:
        recording.validate(spec)
    except ValidationError as e:
        raise ValidationError(e.message, path=path)
    return recording


def write_csv(recording, path):
    """Write a recording in the CSV exchange format (inverse of load_csv)."""
    columns = {f'{CHANNEL_PREFIX}{i}': recording.samples[:, i] for i in range(recording.channels)}
    if recording.imu is not None:
        for j in range(recording.imu.shape[1]):
            columns[f'{IMU_PREFIX}{j}'] = recording.imu[:, j]
    columns['gesture'] = recording.gesture
    columns['repetition'] = recording.repetition
    frame = pd.DataFrame(columns)
    # %.17g always round-trips a float64
    frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n', encoding='utf-8')
    return path


# =========== SYNTHETIC RECORDINGS ===========

def _amplitude_signature(gesture, num_gestures, channels):
    """Per-channel amplitude profile peaking at a gesture-specific channel."""
    phase = np.arange(channels) / channels - (gesture - 1) / num_gestures
    return 0.1 + 0.9 * (0.5 + 0.5 * np.cos(2 * np.pi * phase)) ** 2


def _frequency_band(gesture, num_gestures, fs):
    """Gesture-specific pass band (Hz), kept inside (0.1 fs, 0.4 fs)."""
    centre = fs * (0.15 + 0.2 * (gesture - 1) / max(num_gestures - 1, 1))
    return centre - 0.04 * fs, centre + 0.04 * fs


def _band_noise(rng, rows, channels, band, fs, warmup=64):
    sos = signal.butter(4, band, btype='bandpass', fs=fs, output='sos')
    white = rng.standard_normal((rows + warmup, channels))
    shaped = signal.sosfilt(sos, white, axis=0)[warmup:]
    return shaped / shaped.std(axis=0, keepdims=True)


def _envelope(rows):
    """Raised-cosine onset and offset over a tenth of the segment each."""
    envelope = np.ones(rows)
    ramp = max(rows // 10, 1)
    rise = 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
    envelope[:ramp] = rise
    envelope[rows - ramp:] = rise[::-1]
    return envelope


def synth_recording(spec, num_gestures, reps, seed, gesture_ms=1000.0, rest_ms=1500.0,
                    imu_channels=0, noise_level=0.05):
    """
    Generate a deterministic NinaPro-style recording for desk-scale runs.

    Each gesture repetition is amplitude-modulated band-limited noise with a
    gesture-specific channel profile and pass band, followed by a rest
    segment (gesture 0, repetition 0). Gestures are recorded in order, all
    repetitions of gesture g before gesture g + 1.

    Returns:
        Recording with sample_rate_hz and channel count from spec
    """
    if num_gestures < 1:
        raise ValidationError(f'num_gestures must be >= 1, got {num_gestures}')
    if reps < 1:
        raise ValidationError(f'reps must be >= 1, got {reps}')
    if num_gestures >= spec.num_classes:
        raise ValidationError(
            f'{num_gestures} gestures plus rest do not fit num_classes={spec.num_classes}'
        )

    rng = np.random.default_rng(seed)
    fs = spec.sample_rate_hz
    channels = spec.channels
    active_rows = ms_to_samples(gesture_ms, fs)
    rest_rows = ms_to_samples(rest_ms, fs)
    envelope = _envelope(active_rows)[:, None]
    orientations = rng.uniform(-1.0, 1.0, (num_gestures + 1, imu_channels))
    orientations[REST_LABEL] = 0.0

    samples, imu, gesture, repetition = [], [], [], []
    for g in range(1, num_gestures + 1):
        profile = _amplitude_signature(g, num_gestures, channels)
        band = _frequency_band(g, num_gestures, fs)
        for r in range(1, reps + 1):
            gain = rng.uniform(0.85, 1.15)
            active = _band_noise(rng, active_rows, channels, band, fs) * profile * gain * envelope
            active += noise_level * rng.standard_normal((active_rows, channels))
            rest = noise_level * rng.standard_normal((rest_rows, channels))
            samples.extend([active, rest])
            gesture.extend([np.full(active_rows, g), np.full(rest_rows, REST_LABEL)])
            repetition.extend([np.full(active_rows, r), np.zeros(rest_rows)])
            if imu_channels:
                imu.append(orientations[g] + 0.01 * rng.standard_normal((active_rows, imu_channels)))
                imu.append(orientations[REST_LABEL] + 0.01 * rng.standard_normal((rest_rows, imu_channels)))

    recording = Recording(
        samples=np.vstack(samples),
        sample_rate_hz=fs,
        gesture=np.concatenate(gesture),
        repetition=np.concatenate(repetition),
        imu=np.vstack(imu) if imu_channels else None,
    )
    logger.debug('synthesized %d rows, %d gestures x %d reps', recording.num_samples, num_gestures, reps)
    return recording


# =========== SPLITS ===========

def _carry_forward(labels):
    """
    Assign every zero label the last non-zero label before it.

    Leading zeros take the first non-zero label. Returns None when the
    sequence has no non-zero label at all.
    """
    nonzero = np.flatnonzero(labels != 0)
    if nonzero.size == 0:
        return None
    index = np.where(labels != 0, np.arange(labels.size), -1)
    index = np.maximum.accumulate(index)
    index[index < 0] = nonzero[0]
    return labels[index]


def effective_repetition(recording):
    """Repetition label per row with rest rows attached to the preceding repetition."""
    carried = _carry_forward(recording.repetition)
    if carried is None:
        raise ValidationError('recording has no repetition labels')
    return carried


def split_by_repetition(recording, test_rep, val_rep):
    """
    Partition a recording into (train, val, test) by repetition label.

    Rest rows travel with the preceding repetition; rest before the first
    repetition travels with that first repetition.
    """
    if test_rep == val_rep:
        raise ValidationError(f'test_rep and val_rep must differ, both are {test_rep}')
    present = set(np.unique(recording.repetition).tolist())
    for rep in (val_rep, test_rep):
        if rep not in present:
            raise ValidationError(f'repetition {rep} not present in recording')

    carried = effective_repetition(recording)
    test_mask = carried == test_rep
    val_mask = carried == val_rep
    train_mask = ~(test_mask | val_mask)
    return (
        recording.take(np.flatnonzero(train_mask)),
        recording.take(np.flatnonzero(val_mask)),
        recording.take(np.flatnonzero(test_mask)),
    )


def cross_repetition_folds(recording, reps=None):
    """
    Yield (rep, train, test) for leave-one-repetition-out cross-validation.
    """
    carried = effective_repetition(recording)
    if reps is None:
        reps = sorted(set(np.unique(recording.repetition).tolist()) - {0})
    for rep in reps:
        test_mask = carried == rep
        if not test_mask.any():
            raise ValidationError(f'repetition {rep} not present in recording')
        yield (
            rep,
            recording.take(np.flatnonzero(~test_mask)),
            recording.take(np.flatnonzero(test_mask)),
        )


def select_gestures(recording, groups, relabel=True):
    """
    Keep rest plus the gestures of the named NinaPro groups.

    Rows of other gestures are dropped with their trailing rest.

    Returns:
        (Recording, label_map) where label_map maps old labels to new ones
    """
    allowed = set()
    for name in groups:
        if name not in GESTURE_GROUPS:
            raise ValidationError(f'unknown gesture group {name!r}')
        allowed.update(GESTURE_GROUPS[name])

    carried = _carry_forward(recording.gesture)
    if carried is None:
        carried = recording.gesture
    keep = np.isin(carried, sorted(allowed))
    # leading rest before any gesture has no owner
    keep |= (recording.gesture == REST_LABEL) & (np.maximum.accumulate(recording.gesture != REST_LABEL) == 0)
    subset = recording.take(np.flatnonzero(keep))

    present = sorted(set(np.unique(subset.gesture).tolist()) - {REST_LABEL})
    label_map = {REST_LABEL: REST_LABEL}
    label_map.update({old: (new if relabel else old) for new, old in enumerate(present, start=1)})
    if relabel:
        lookup = np.zeros(max(label_map) + 1, dtype=np.int64)
        for old, new in label_map.items():
            lookup[old] = new
        subset = Recording(
            samples=subset.samples,
            sample_rate_hz=subset.sample_rate_hz,
            gesture=lookup[subset.gesture],
            repetition=subset.repetition,
            imu=subset.imu,
            source=subset.source,
            row_index=subset.row_index,
        )
    return subset, label_map
