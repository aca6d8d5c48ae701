"""
Tests for the semg command-line interface.
"""

import json
import os

import pandas as pd
import pytest
from click.testing import CliRunner

from app import cli
from utils import read_windows


def make_runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


def run(*args):
    return make_runner().invoke(cli, ['--preset', 'testing', *map(str, args)], catch_exceptions=False)


def error_payload(result):
    lines = [line for line in result.stderr.splitlines() if line.strip()]
    return json.loads(lines[-1])


@pytest.fixture(scope='module')
def workspace(tmp_path_factory):
    """A synthetic recording and its train/val/test window split."""
    root = tmp_path_factory.mktemp('cli')
    recording = root / 'rec.csv'
    windows = root / 'windows'
    result = run('synth', '--classes', 4, '--reps', 6, '--seed', 11, '--out', recording,
                 '--gesture-ms', 400, '--rest-ms', 400)
    assert result.exit_code == 0, result.output
    result = run('window', '--in', recording, '--out', windows)
    assert result.exit_code == 0, result.output
    return root


def test_synth_then_validate(workspace):
    result = run('validate', workspace / 'rec.csv')
    assert result.exit_code == 0
    summary = json.loads(result.stdout)
    assert summary['status'] == 'ok'
    assert summary['channels'] == 16
    assert summary['gestures'] == [0, 1, 2, 3, 4]
    assert summary['repetitions'] == [0, 1, 2, 3, 4, 5, 6]
    assert os.path.exists(str(workspace / 'rec.csv') + '.manifest.json')


def test_synth_is_deterministic(tmp_path):
    for name in ('a.csv', 'b.csv'):
        assert run('synth', '--classes', 2, '--reps', 2, '--seed', 5, '--out', tmp_path / name).exit_code == 0
    assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()


def test_missing_option_is_usage_error():
    result = run('synth', '--classes', 3)
    assert result.exit_code == 2


def test_label_out_of_range_fails_with_json(tmp_path):
    path = tmp_path / 'wide.csv'
    assert run('synth', '--classes', 6, '--reps', 1, '--seed', 0, '--out', path,
               '--gesture-ms', 300, '--rest-ms', 300).exit_code == 0
    result = run('validate', path)
    assert result.exit_code == 1
    payload = error_payload(result)
    assert payload['error'] == 'ValidationError'
    assert payload['file'] == str(path)
    manifest = json.loads(open(str(path) + '.validate.manifest.json').read())
    assert manifest['status'] == 'error'


def test_missing_input_fails_with_json(tmp_path):
    result = run('validate', tmp_path / 'absent.csv')
    assert result.exit_code == 1
    assert error_payload(result)['error'] == 'FormatError'


def test_window_outputs(workspace):
    windows = workspace / 'windows'
    summary = json.loads((windows / 'summary.json').read_text())
    assert set(summary['splits']) == {'train', 'val', 'test'}
    train = read_windows(windows / 'train.bin')
    assert train.windows[0].shape == (38, 16)
    assert summary['splits']['train']['windows'] == len(train)
    assert sum(summary['splits']['train']['class_counts']) == len(train)
    assert (windows / 'manifest.json').exists()


def test_preprocess_command(workspace, tmp_path):
    out = tmp_path / 'clean.csv'
    result = run('preprocess', '--in', workspace / 'rec.csv', '--out', out)
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    # smoothing kernel of 15 samples at 200 Hz trims 14 leading rows
    assert len(frame) == len(pd.read_csv(workspace / 'rec.csv')) - 14


def test_augment_command(workspace, tmp_path):
    out = tmp_path / 'aug.bin'
    result = run('augment', '--in', workspace / 'windows' / 'val.bin', '--out', out, '--seed', 2, '--copies', 1)
    assert result.exit_code == 0
    original = read_windows(workspace / 'windows' / 'val.bin')
    augmented = read_windows(out)
    non_rest = int((original.labels != 0).sum())
    assert len(augmented) == len(original) + non_rest


def test_augment_directory(workspace, tmp_path):
    out = tmp_path / 'aug'
    result = run('augment', '--in', workspace / 'windows', '--out', out, '--seed', 2, '--copies', 0)
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in out.glob('*.bin')) == ['test.bin', 'train.bin', 'val.bin']
    for name in ('train', 'val', 'test'):
        original = read_windows(workspace / 'windows' / f'{name}.bin')
        augmented = read_windows(out / f'{name}.bin')
        assert len(augmented) == len(original)
        assert augmented.labels.tolist() == original.labels.tolist()
    manifest = json.loads((out / 'manifest.json').read_text())
    assert manifest['command'] == 'augment'
    assert len(manifest['outputs']) == 3


def test_augment_empty_directory_fails(tmp_path):
    result = run('augment', '--in', tmp_path, '--out', tmp_path / 'out', '--seed', 0)
    assert result.exit_code == 1
    assert error_payload(result)['error'] == 'FormatError'


def test_train_eval_and_resume(workspace, tmp_path):
    run_dir = tmp_path / 'run'
    result = run('train', '--data', workspace / 'windows', '--out', run_dir, '--seed', 0)
    assert result.exit_code == 0, result.output
    history = pd.read_csv(run_dir / 'history.csv')
    assert list(history['epoch']) == [0, 1, 2]
    assert (run_dir / 'model.ckpt').exists()
    manifest = json.loads((run_dir / 'manifest.json').read_text())
    assert manifest['command'] == 'train'
    assert manifest['status'] == 'ok'
    assert manifest['seed'] == 0

    report = tmp_path / 'eval.json'
    attention = tmp_path / 'attention'
    result = run('eval', '--ckpt', run_dir / 'model.ckpt', '--data', workspace / 'windows',
                 '--report', report, '--confusion', tmp_path / 'confusion.csv',
                 '--xlsx', tmp_path / 'eval.xlsx', '--dump-attention', attention, '--limit', 3)
    assert result.exit_code == 0, result.output
    payload = json.loads(report.read_text())
    assert 0.0 <= payload['accuracy'] <= 1.0
    assert payload['num_classes'] == 5
    assert len(list(attention.glob('*.csv'))) == 3
    assert (tmp_path / 'eval.xlsx').exists()

    result = run('train', '--data', workspace / 'windows', '--out', run_dir, '--seed', 0,
                 '--epochs', 4, '--resume', run_dir / 'model.ckpt')
    assert result.exit_code == 0, result.output
    assert list(pd.read_csv(run_dir / 'history.csv')['epoch']) == [0, 1, 2, 3]


def test_eval_rejects_garbage_checkpoint(workspace, tmp_path):
    bogus = tmp_path / 'bogus.ckpt'
    bogus.write_bytes(b'not a checkpoint at all')
    result = run('eval', '--ckpt', bogus, '--data', workspace / 'windows', '--report', tmp_path / 'r.json')
    assert result.exit_code == 1
    assert error_payload(result)['error'] == 'CheckpointError'


def test_baselines_command(workspace, tmp_path):
    report = tmp_path / 'baselines.json'
    result = run('baselines', '--data', workspace / 'windows', '--report', report, '--seed', 0, '--trials', 20)
    assert result.exit_code == 0
    payload = json.loads(report.read_text())
    assert set(payload) == {'weighted-random', 'unweighted-random', 'all-zeros', 'all-ones'}
    assert payload['all-zeros']['mcc'] == 0.0
    assert payload['weighted-random']['trials'] == 20


def test_ablate_command(workspace, tmp_path):
    out = tmp_path / 'ablate'
    result = run('ablate', '--data', workspace / 'windows', '--out', out, '--seed', 0,
                 '--arch', 'ablation-relu', '--arch', 'no-classifier', '--epochs', 1, '--workers', 1)
    assert result.exit_code == 0, result.output
    rows = json.loads((out / 'report.json').read_text())['rows']
    assert [row['name'] for row in rows] == ['ablation-relu', 'no-classifier']
    assert rows[1]['parameters'] < rows[0]['parameters']
    assert (out / 'report.csv').exists()
    assert (out / 'report.xlsx').exists()


@pytest.mark.slow
def test_crossval_command(workspace, tmp_path):
    out = tmp_path / 'cv'
    result = run('crossval', '--in', workspace / 'rec.csv', '--out', out, '--seed', 0, '--epochs', 1)
    assert result.exit_code == 0, result.output
    payload = json.loads((out / 'crossval.json').read_text())
    assert [fold['repetition'] for fold in payload['folds']] == [1, 2, 3, 4, 5, 6]
    assert 'accuracy_ci' in payload['mean']
