"""
Tests for window files, checkpoints, heatmaps and report writers.
"""

import json

import numpy as np
import pandas as pd
import pytest
from openpyxl import load_workbook

from models import RunManifest, Window, WindowSet
from nn import build
from services import OptState, Ranger, TrainConfig, evaluate
from utils import (
    PIL_AVAILABLE,
    CheckpointError,
    HeatmapError,
    WindowFormatError,
    encode_windows,
    eval_sheets,
    load_checkpoint,
    manifest_path,
    read_windows,
    render_heatmap,
    save_checkpoint,
    write_attention_csv,
    write_attention_png,
    write_json,
    write_manifest,
    write_rows_csv,
    write_windows,
    write_xlsx,
)
from utils.checkpoint import encode_checkpoint, decode_checkpoint


def _window_set(rng, count=5):
    windows = [
        Window(data=rng.standard_normal((38, 3)), label=i % 3, source=2, start=5 * i)
        for i in range(count)
    ]
    return WindowSet(windows=windows, num_classes=3)


# =========== WINDOW FILES ===========

def test_window_file_round_trip(tmp_path, rng):
    original = _window_set(rng)
    path = tmp_path / 'train.bin'
    write_windows(original, path)
    loaded = read_windows(path)
    assert len(loaded) == 5
    assert loaded.num_classes == 3
    for a, b in zip(original, loaded):
        assert b.shape == (38, 3)
        assert (b.label, b.source, b.start) == (a.label, a.source, a.start)
        assert np.array_equal(b.data, a.data.astype(np.float32).astype(np.float64))


def test_empty_window_file(tmp_path):
    path = tmp_path / 'empty.bin'
    write_windows(WindowSet(num_classes=4), path)
    loaded = read_windows(path)
    assert len(loaded) == 0
    assert loaded.status == 'empty'
    assert loaded.num_classes == 4


def test_truncated_window_file(tmp_path, rng):
    payload = encode_windows(_window_set(rng))
    path = tmp_path / 'cut.bin'
    path.write_bytes(payload[:-7])
    with pytest.raises(WindowFormatError) as info:
        read_windows(path)
    assert info.value.path == path


def test_window_file_bad_magic(tmp_path, rng):
    payload = bytearray(encode_windows(_window_set(rng)))
    payload[:8] = b'NOTWINDO'
    path = tmp_path / 'bad.bin'
    path.write_bytes(bytes(payload))
    with pytest.raises(WindowFormatError):
        read_windows(path)


def test_window_file_trailing_bytes(tmp_path, rng):
    path = tmp_path / 'extra.bin'
    path.write_bytes(encode_windows(_window_set(rng)) + b'\x00')
    with pytest.raises(WindowFormatError):
        read_windows(path)


def test_missing_window_file(tmp_path):
    with pytest.raises(WindowFormatError):
        read_windows(tmp_path / 'absent.bin')


# =========== CHECKPOINTS ===========

def test_checkpoint_restores_parameters_and_optimizer(tmp_path, rng, toy_config):
    network = build(toy_config, seed=4)
    optimizer = Ranger(network, TrainConfig(epochs=2, warm_epochs=0))
    network.loss_and_grad(rng.standard_normal((3, 6, 4)), np.array([0, 1, 2]))
    optimizer.step(1e-3)

    path = tmp_path / 'model.ckpt'
    save_checkpoint(path, network, optimizer.state, epoch=7, meta={'history': [{'epoch': 7}]})
    checkpoint = load_checkpoint(path)

    assert checkpoint.epoch == 7
    assert checkpoint.meta['history'] == [{'epoch': 7}]
    assert checkpoint.network.config == toy_config
    before, after = network.state_dict(), checkpoint.network.state_dict()
    assert before.keys() == after.keys()
    assert all(np.array_equal(before[k], after[k]) for k in before)
    assert checkpoint.state.step == 1
    for slot in ('m', 'v', 'slow'):
        expected = getattr(optimizer.state, slot)
        restored = getattr(checkpoint.state, slot)
        assert all(np.array_equal(expected[k], restored[k]) for k in expected)


def test_checkpoint_without_optimizer(toy_config):
    checkpoint = decode_checkpoint(encode_checkpoint(build(toy_config, seed=0)))
    assert checkpoint.state is None
    assert checkpoint.epoch is None


def test_restored_network_predicts_identically(rng, toy_config):
    network = build(toy_config, seed=2)
    restored = decode_checkpoint(encode_checkpoint(network)).network
    x = rng.standard_normal((5, 6, 4))
    assert np.array_equal(network.forward(x), restored.forward(x))


def test_corrupt_checkpoint(tmp_path, toy_config):
    payload = encode_checkpoint(build(toy_config, seed=0), OptState())
    with pytest.raises(CheckpointError):
        decode_checkpoint(payload[:-3])
    with pytest.raises(CheckpointError):
        decode_checkpoint(b'XXXXXXXX' + payload[8:])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / 'absent.ckpt')


# =========== HEATMAPS ===========

def test_attention_csv_layout(tmp_path):
    alpha = np.full((3, 4), 0.25)
    path = tmp_path / 'alpha.csv'
    write_attention_csv(alpha, path)
    frame = pd.read_csv(path, index_col='channel')
    assert list(frame.index) == ['ch0', 'ch1', 'ch2']
    assert list(frame.columns) == ['t0', 't1', 't2', 't3']
    assert np.allclose(frame.to_numpy(), 0.25)


@pytest.mark.skipif(not PIL_AVAILABLE, reason='Pillow not installed')
def test_heatmap_png(tmp_path):
    alpha = np.array([[0.1, 0.2, 0.7], [0.5, 0.25, 0.25]])
    image = render_heatmap(alpha, scale=4)
    assert image.size == (12, 8)
    assert image.getpixel((0, 0)) == (20, 24, 82)
    assert image.getpixel((11, 0)) == (250, 230, 40)
    write_attention_png(alpha, tmp_path / 'alpha.png')
    assert (tmp_path / 'alpha.png').stat().st_size > 0


@pytest.mark.skipif(not PIL_AVAILABLE, reason='Pillow not installed')
def test_oversized_heatmap():
    with pytest.raises(HeatmapError):
        render_heatmap(np.ones((16, 600)), scale=8)


# =========== REPORTS ===========

def test_json_nan_becomes_null(tmp_path):
    path = tmp_path / 'report.json'
    write_json({'val_acc': float('nan'), 'count': np.int64(3), 'arr': np.arange(2)}, path)
    assert json.loads(path.read_text()) == {'val_acc': None, 'count': 3, 'arr': [0, 1]}


def test_rows_csv_keeps_column_order(tmp_path):
    path = tmp_path / 'history.csv'
    write_rows_csv([{'b': 1, 'a': 2.5}], path, columns=('a', 'b'))
    assert path.read_text().splitlines() == ['a,b', '2.5,1']


def test_eval_workbook(tmp_path):
    report = evaluate([0, 1, 1], [0, 1, 0], 2)
    path = tmp_path / 'eval.xlsx'
    write_xlsx(eval_sheets(report), path)
    workbook = load_workbook(path)
    assert workbook.sheetnames == ['Metrics', 'Confusion']
    metrics = {row[0]: row[1] for row in workbook['Metrics'].iter_rows(min_row=2, values_only=True)}
    assert metrics['accuracy'] == pytest.approx(2 / 3)
    assert workbook['Metrics']['A1'].font.bold


def test_manifest_paths(tmp_path):
    assert manifest_path(tmp_path) == str(tmp_path / 'manifest.json')
    assert manifest_path(tmp_path / 'report.json') == str(tmp_path / 'report.json') + '.manifest.json'


def test_manifest_written(tmp_path):
    manifest = RunManifest(command='baselines', config={'trials': 10}, seed=3).finish('ok')
    path = write_manifest(manifest, tmp_path / 'report.json')
    record = json.loads(open(path).read())
    assert record['command'] == 'baselines'
    assert record['seed'] == 3
    assert record['status'] == 'ok'
    assert record['finished_at'] is not None
