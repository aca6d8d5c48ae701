"""
Tests for window slicing and per-window preprocessing.
"""

import numpy as np
import pytest

from models import Recording
from services import (
    PreprocessConfig,
    build_windows,
    class_histogram,
    cross_repetition_folds,
    slice_windows,
    split_by_repetition,
    window_starts,
)


def _stream(gesture, repetition, channels=2):
    gesture = np.asarray(gesture)
    return Recording(
        samples=np.arange(gesture.size * channels, dtype=np.float64).reshape(-1, channels),
        sample_rate_hz=200.0,
        gesture=gesture,
        repetition=np.asarray(repetition),
    )


def test_window_starts_drop_short_tail():
    assert window_starts(120, 52, 5).tolist() == list(range(0, 69, 5))
    assert window_starts(40, 52, 5).size == 0


def test_window_count_and_geometry():
    """260 ms / 25 ms stride at 200 Hz: 52-sample windows every 5 samples."""
    n = 300
    rec = _stream(np.ones(n, dtype=int), np.ones(n, dtype=int))
    ws = slice_windows(rec, 260.0, 235.0, num_classes=2)
    assert len(ws) == (n - 52) // 5 + 1
    assert all(w.shape == (52, 2) for w in ws)
    assert [w.start for w in ws][:3] == [0, 5, 10]
    assert np.array_equal(ws.windows[1].data, rec.samples[5:57])


def test_short_recording_gives_empty_set():
    rec = _stream(np.ones(30, dtype=int), np.ones(30, dtype=int))
    ws = slice_windows(rec, 260.0, 235.0, num_classes=2)
    assert len(ws) == 0
    assert ws.status == 'empty'
    assert ws.warnings


def test_label_is_first_sample_gesture():
    gesture = np.r_[np.full(60, 2), np.zeros(60, dtype=int)]
    repetition = np.r_[np.ones(60, dtype=int), np.zeros(60, dtype=int)]
    ws = slice_windows(_stream(gesture, repetition), 260.0, 235.0, num_classes=3)
    by_start = {w.start: w.label for w in ws}
    assert by_start[55] == 2
    assert by_start[60] == 0


def test_windows_spanning_two_repetitions_are_discarded():
    repetition = np.r_[np.ones(60, dtype=int), np.full(60, 2)]
    gesture = np.ones(120, dtype=int)
    ws = slice_windows(_stream(gesture, repetition), 260.0, 235.0, num_classes=2)
    for w in ws:
        assert w.start + 52 <= 60 or w.start >= 60


def test_class_histogram_sums_to_window_count(small_recording, desk_spec):
    ws = slice_windows(small_recording, num_classes=desk_spec.num_classes)
    counts = class_histogram(ws)
    assert counts.sum() == len(ws)
    assert counts.shape == (desk_spec.num_classes,)
    assert np.all(counts[:5] > 0)


def test_build_windows_preprocesses(small_recording, desk_spec):
    ws = build_windows(small_recording, desk_spec, PreprocessConfig())
    raw = build_windows(small_recording, desk_spec, PreprocessConfig(), raw=True)
    assert len(ws) == len(raw)
    assert ws.windows[0].shape == (38, desk_spec.channels)
    assert raw.windows[0].shape == (52, desk_spec.channels)


def _tagged(recording):
    """Copy of a recording whose ch0 holds each row's position in the stream."""
    samples = recording.samples.copy()
    samples[:, 0] = np.arange(recording.num_samples)
    return Recording(
        samples=samples,
        sample_rate_hz=recording.sample_rate_hz,
        gesture=recording.gesture,
        repetition=recording.repetition,
    )


def _assert_contiguous(window_set):
    for w in window_set:
        rows = w.data[:, 0]
        assert np.array_equal(rows, np.arange(w.start, w.start + rows.size))


@pytest.mark.parametrize('part', [0, 1, 2])
def test_split_windows_are_contiguous_source_slices(small_recording, part):
    recording = _tagged(small_recording)
    piece = split_by_repetition(recording, test_rep=5, val_rep=3)[part]
    ws = slice_windows(piece, num_classes=5)
    assert len(ws) > 0
    _assert_contiguous(ws)


def test_fold_and_subset_windows_are_contiguous(small_recording):
    recording = _tagged(small_recording)
    for _, train, test in cross_repetition_folds(recording, reps=[2]):
        _assert_contiguous(slice_windows(train, num_classes=5))
        _assert_contiguous(slice_windows(test, num_classes=5))


def test_gap_between_same_repetition_segments_is_discarded():
    """Two rep-5 segments joined by a split share a label but not a boundary."""
    rec = _stream(np.ones(200, dtype=int), np.r_[np.full(100, 5), np.zeros(100, dtype=int)])
    joined = rec.take(np.r_[np.arange(0, 60), np.arange(140, 200)])
    ws = slice_windows(joined, 260.0, 235.0, num_classes=2)
    starts = [w.start for w in ws]
    assert starts == [0, 5, 140, 145]
    assert all(s + 52 <= 60 or s >= 140 for s in starts)


def test_take_keeps_source_rows():
    rec = _stream(np.ones(10, dtype=int), np.ones(10, dtype=int))
    assert rec.source_rows.tolist() == list(range(10))
    sub = rec.take([2, 3, 7]).take([1, 2])
    assert sub.source_rows.tolist() == [3, 7]
