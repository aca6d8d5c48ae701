"""
sEMG Attention Classifier CLI

Subcommands for the whole pipeline: synthesize or validate recordings,
preprocess, window, augment, train, evaluate, run ablations, reference
baselines and cross-repetition cross-validation.

Exit codes: 0 success, 1 data/validation failure (JSON error object on
stderr), 2 usage error. Every run writes a manifest beside its outputs.
"""

import os

# Thread caps must be exported before numpy loads its BLAS
_THREADS = os.environ.get('SEMG_THREADS')
if _THREADS:
    for _var in ('OMP_NUM_THREADS', 'OPENBLAS_NUM_THREADS', 'MKL_NUM_THREADS'):
        os.environ.setdefault(_var, _THREADS)

import json
import logging
import sys
from contextlib import contextmanager
from functools import wraps

import click
import numpy as np

from config import config as CONFIGS, get_config
from constants import (
    ABLATION_SUITES,
    ABLATIONS,
    FULL_ARCHITECTURE,
    GESTURE_GROUPS,
    VALID_BASELINES,
    VAL_REPETITION,
    TEST_REPETITION,
)
from models import DatasetSpec, RunManifest, SemgError, ValidationError, FormatError, WindowSet
from nn import ModelConfig, ablation_config, build
from services import (
    AugmentConfig,
    PreprocessConfig,
    TrainConfig,
    HISTORY_COLUMNS,
    augment_set,
    baseline_report,
    build_windows,
    class_histogram,
    cross_repetition_folds,
    load_csv,
    mean_confidence_interval,
    preprocess_stream,
    run_ablation,
    score_windows,
    select_gestures,
    split_by_repetition,
    synth_recording,
    train_loop,
    write_csv,
)
from utils import (
    ablation_sheets,
    eval_sheets,
    load_checkpoint,
    read_windows,
    save_checkpoint,
    write_attention_csv,
    write_attention_png,
    write_confusion_csv,
    write_json,
    write_manifest,
    write_rows_csv,
    write_windows,
    write_xlsx,
)

logger = logging.getLogger('semg')

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
ARCH_CHOICES = [FULL_ARCHITECTURE] + [f'ablation-{name}' for name in ABLATIONS] + list(ABLATIONS)


# =========== RUN PLUMBING ===========

def _fail(payload):
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(1)


def semg_command(fn):
    """Turn library errors into exit code 1 with a JSON error object on stderr."""
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SemgError as e:
            _fail(e.to_dict())
        except OSError as e:
            _fail({'error': type(e).__name__, 'message': e.strerror or str(e), 'file': e.filename})
    return wrapper


@contextmanager
def run_manifest(ctx, command, anchor, seed=None, inputs=(), settings=None):
    """Yield a RunManifest and write it beside anchor when the block ends."""
    cfg = ctx.obj['cfg']
    manifest = RunManifest(
        command=command,
        config={'preset': ctx.obj['preset'], **(settings or {})},
        seed=seed,
        inputs=[str(p) for p in inputs],
        code_version=cfg.CODE_VERSION,
        argv=list(sys.argv[1:]),
    )
    try:
        yield manifest
    except SemgError as e:
        manifest.finish('error', e.to_dict())
        try:
            write_manifest(manifest, anchor)
        except OSError:
            logger.warning('could not write manifest for failed run beside %s', anchor)
        raise
    manifest.finish('ok')
    path = write_manifest(manifest, anchor)
    logger.info('wrote %s', path)


def _output(manifest, path):
    manifest.outputs.append(str(path))
    return path


def _dataset_spec(ctx, **overrides):
    cfg = ctx.obj['cfg']
    return DatasetSpec.from_preset(
        cfg.PRESET, window_ms=cfg.WINDOW_MS, overlap_ms=cfg.OVERLAP_MS
    ).with_overrides(**overrides)


def _load_split(data, name):
    """A window file, or name.bin inside a window directory."""
    path = os.path.join(data, f'{name}.bin') if os.path.isdir(data) else data
    if not os.path.exists(path):
        raise FormatError(f'window file not found: {path}', path=path)
    return read_windows(path), path


def _geometry(window_set, path):
    if not len(window_set):
        raise ValidationError('window file holds no windows', path=path)
    return window_set.windows[0].shape


# =========== CLI ===========

@click.group()
@click.option('--preset', type=click.Choice(sorted(CONFIGS)), default=None,
              help='Configuration preset (default: $SEMG_ENV or db5).')
@click.option('--log-level', default=None, help='Logging level (default: $SEMG_LOG_LEVEL or INFO).')
@click.pass_context
def cli(ctx, preset, log_level):
    """sEMG gesture classification with channel-wise temporal attention."""
    preset = preset or os.environ.get('SEMG_ENV', 'db5')
    cfg = get_config(preset)
    logging.basicConfig(
        level=(log_level or cfg.LOG_LEVEL).upper(),
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    ctx.obj = {'cfg': cfg, 'preset': preset if preset in CONFIGS else 'default'}


@cli.command()
@click.option('--classes', type=click.IntRange(min=1), required=True, help='Number of gestures (rest excluded).')
@click.option('--reps', type=click.IntRange(min=1), default=6, show_default=True)
@click.option('--seed', type=int, required=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), required=True)
@click.option('--channels', type=click.IntRange(min=1), default=None)
@click.option('--rate', type=float, default=None, help='Sample rate in Hz.')
@click.option('--imu', 'imu_channels', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--gesture-ms', type=float, default=1000.0, show_default=True)
@click.option('--rest-ms', type=float, default=1500.0, show_default=True)
@click.pass_context
@semg_command
def synth(ctx, classes, reps, seed, out_path, channels, rate, imu_channels, gesture_ms, rest_ms):
    """Write a deterministic synthetic recording in the CSV exchange format."""
    base = _dataset_spec(ctx, channels=channels, sample_rate_hz=rate)
    spec = base.with_overrides(num_classes=max(base.num_classes, classes + 1))
    settings = {
        'classes': classes, 'reps': reps, 'channels': spec.channels,
        'sample_rate_hz': spec.sample_rate_hz, 'imu_channels': imu_channels,
        'gesture_ms': gesture_ms, 'rest_ms': rest_ms,
    }
    with run_manifest(ctx, 'synth', out_path, seed=seed, settings=settings) as manifest:
        recording = synth_recording(
            spec, classes, reps, seed,
            gesture_ms=gesture_ms, rest_ms=rest_ms, imu_channels=imu_channels,
        )
        write_csv(recording, _output(manifest, out_path))
        logger.info('wrote %d rows to %s', recording.num_samples, out_path)


@cli.command()
@click.argument('path', type=click.Path(dir_okay=False))
@click.option('--channels', type=click.IntRange(min=1), default=None)
@click.option('--classes', type=click.IntRange(min=2), default=None, help='Label alphabet size, rest included.')
@click.option('--rate', type=float, default=None)
@click.pass_context
@semg_command
def validate(ctx, path, channels, classes, rate):
    """Check a CSV recording against the preset geometry and label ranges."""
    spec = _dataset_spec(ctx, channels=channels, num_classes=classes, sample_rate_hz=rate)
    settings = {'channels': spec.channels, 'num_classes': spec.num_classes}
    with run_manifest(ctx, 'validate', f'{path}.validate', inputs=[path], settings=settings):
        recording = load_csv(path, spec)
        summary = {
            'status': 'ok',
            'rows': recording.num_samples,
            'channels': recording.channels,
            'imu_channels': 0 if recording.imu is None else int(recording.imu.shape[1]),
            'gestures': sorted(set(np.unique(recording.gesture).tolist())),
            'repetitions': sorted(set(np.unique(recording.repetition).tolist())),
        }
        click.echo(json.dumps(summary, sort_keys=True))


@cli.command()
@click.option('--in', 'in_path', type=click.Path(dir_okay=False), required=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), required=True)
@click.option('--cutoff', type=float, default=None, help='High-pass cutoff in Hz.')
@click.option('--order', type=click.IntRange(min=1), default=None)
@click.option('--kernel', default=None, help="Smoothing kernel length or 'auto'.")
@click.option('--channels', type=click.IntRange(min=1), default=None)
@click.option('--rate', type=float, default=None)
@click.pass_context
@semg_command
def preprocess(ctx, in_path, out_path, cutoff, order, kernel, channels, rate):
    """Rectify, high-pass filter and smooth a whole recording."""
    spec = _dataset_spec(ctx, channels=channels, sample_rate_hz=rate)
    pre = PreprocessConfig.from_config(ctx.obj['cfg'], spec.sample_rate_hz, cutoff, order, kernel)
    settings = {
        'cutoff_hz': pre.filter.cutoff_hz, 'order': pre.filter.order,
        'kernel': pre.smoother.kernel_len, 'sample_rate_hz': spec.sample_rate_hz,
    }
    with run_manifest(ctx, 'preprocess', out_path, inputs=[in_path], settings=settings) as manifest:
        recording = load_csv(in_path, spec)
        write_csv(preprocess_stream(recording, pre), _output(manifest, out_path))


@cli.command()
@click.option('--in', 'in_path', type=click.Path(dir_okay=False), required=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--window-ms', type=float, default=None)
@click.option('--overlap-ms', type=float, default=None)
@click.option('--val-rep', type=int, default=VAL_REPETITION, show_default=True)
@click.option('--test-rep', type=int, default=TEST_REPETITION, show_default=True)
@click.option('--no-split', is_flag=True, help='Write every window to windows.bin.')
@click.option('--raw', is_flag=True, help='Skip per-window preprocessing.')
@click.option('--gestures', multiple=True, type=click.Choice(sorted(GESTURE_GROUPS)),
              help='Keep only these gesture groups (repeatable).')
@click.option('--imu', is_flag=True, help='Append IMU columns to every window.')
@click.option('--cutoff', type=float, default=None)
@click.option('--order', type=click.IntRange(min=1), default=None)
@click.option('--kernel', default=None)
@click.option('--channels', type=click.IntRange(min=1), default=None)
@click.option('--classes', type=click.IntRange(min=2), default=None)
@click.option('--rate', type=float, default=None)
@click.pass_context
@semg_command
def window(ctx, in_path, out_dir, window_ms, overlap_ms, val_rep, test_rep, no_split, raw,
           gestures, imu, cutoff, order, kernel, channels, classes, rate):
    """Split by repetition, slice overlapping windows and preprocess each one."""
    spec = _dataset_spec(
        ctx, channels=channels, num_classes=classes, sample_rate_hz=rate,
        window_ms=window_ms, overlap_ms=overlap_ms,
    )
    pre = PreprocessConfig.from_config(ctx.obj['cfg'], spec.sample_rate_hz, cutoff, order, kernel)
    os.makedirs(out_dir, exist_ok=True)
    settings = {
        'window_ms': spec.window_ms, 'overlap_ms': spec.overlap_ms,
        'val_rep': val_rep, 'test_rep': test_rep, 'split': not no_split, 'raw': raw,
        'gestures': list(gestures), 'imu': imu, 'cutoff_hz': pre.filter.cutoff_hz,
        'order': pre.filter.order, 'kernel': pre.smoother.kernel_len,
    }
    with run_manifest(ctx, 'window', out_dir, inputs=[in_path], settings=settings) as manifest:
        recording = load_csv(in_path, spec)
        label_map = None
        if gestures:
            recording, label_map = select_gestures(recording, gestures)
            spec = spec.with_overrides(num_classes=len(label_map))
        parts = {'windows': recording} if no_split else dict(
            zip(('train', 'val', 'test'), split_by_repetition(recording, test_rep, val_rep))
        )
        summary = {'num_classes': spec.num_classes, 'label_map': label_map, 'splits': {}}
        for name, part in parts.items():
            window_set = build_windows(part, spec, pre, include_imu=imu, raw=raw)
            path = os.path.join(out_dir, f'{name}.bin')
            write_windows(window_set, _output(manifest, path))
            summary['splits'][name] = {
                'windows': len(window_set),
                'status': window_set.status,
                'shape': list(window_set.windows[0].shape) if len(window_set) else None,
                'class_counts': class_histogram(window_set).tolist(),
            }
            logger.info('%s: %d windows', name, len(window_set))
        write_json(summary, _output(manifest, os.path.join(out_dir, 'summary.json')))


@cli.command()
@click.option('--in', 'in_path', type=click.Path(), required=True,
              help='A window file, or a directory of *.bin window files.')
@click.option('--out', 'out_path', type=click.Path(), required=True,
              help='Output file, or output directory when --in is a directory.')
@click.option('--seed', type=int, required=True)
@click.option('--snr-min', type=int, default=None)
@click.option('--snr-max', type=int, default=None)
@click.option('--corrected/--verbatim', default=None, help='Noise power sign convention.')
@click.option('--copies', type=click.IntRange(min=0), default=None, help='Extra augmented copies per window.')
@click.option('--imu-channels', type=click.IntRange(min=0), default=0, show_default=True)
@click.pass_context
@semg_command
def augment(ctx, in_path, out_path, seed, snr_min, snr_max, corrected, copies, imu_channels):
    """Add SNR-calibrated Gaussian noise to every non-rest window."""
    aug = AugmentConfig.from_config(
        ctx.obj['cfg'], seed, snr_min_db=snr_min, snr_max_db=snr_max,
        corrected=corrected, extra_copies=copies, imu_channels=imu_channels,
    )
    settings = {
        'snr_min_db': aug.snr_min_db, 'snr_max_db': aug.snr_max_db,
        'corrected': aug.corrected, 'extra_copies': aug.extra_copies,
        'imu_channels': aug.imu_channels,
    }
    if os.path.isdir(in_path):
        names = sorted(name for name in os.listdir(in_path) if name.endswith('.bin'))
        if not names:
            raise FormatError(f'no .bin window files in {in_path}', path=in_path)
        os.makedirs(out_path, exist_ok=True)
        # one independent stream per file, in sorted file order
        streams = np.random.SeedSequence(seed).spawn(len(names))
        jobs = [
            (os.path.join(in_path, name), os.path.join(out_path, name), np.random.default_rng(stream))
            for name, stream in zip(names, streams)
        ]
    else:
        jobs = [(in_path, out_path, np.random.default_rng(seed))]
    inputs = [source for source, _, _ in jobs]

    with run_manifest(ctx, 'augment', out_path, seed=seed, inputs=inputs, settings=settings) as manifest:
        for source, target, rng in jobs:
            augmented = augment_set(read_windows(source), aug, rng)
            write_windows(augmented, _output(manifest, target))
            logger.info('%s: %d windows', target, len(augmented))


def _model_config(ctx, arch, steps, channels, num_classes, expanded=None):
    base = ModelConfig.from_config(
        ctx.obj['cfg'], steps, channels, num_classes, expanded_channels=expanded,
    )
    return ablation_config(arch, base)


@cli.command()
@click.option('--data', type=click.Path(exists=True, file_okay=False), required=True,
              help='Directory holding train.bin and val.bin.')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--seed', type=int, required=True)
@click.option('--arch', type=click.Choice(ARCH_CHOICES), default=FULL_ARCHITECTURE, show_default=True)
@click.option('--epochs', type=click.IntRange(min=1), default=None)
@click.option('--batch', 'batch_size', type=click.IntRange(min=1), default=None)
@click.option('--lr', 'lr_start', type=float, default=None)
@click.option('--lr-end', type=float, default=None)
@click.option('--warm-epochs', type=click.IntRange(min=0), default=None)
@click.option('--gamma', 'focal_gamma', type=float, default=None)
@click.option('--expanded', type=click.IntRange(min=1), default=None, help='Expanded channel count.')
@click.option('--no-augment', is_flag=True)
@click.option('--corrected/--verbatim', default=None)
@click.option('--imu-channels', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--resume', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Continue from a checkpoint written by an earlier run.')
@click.pass_context
@semg_command
def train(ctx, data, out_dir, seed, arch, epochs, batch_size, lr_start, lr_end, warm_epochs,
          focal_gamma, expanded, no_augment, corrected, imu_channels, resume):
    """Train the attention network with Ranger and focal loss."""
    cfg = ctx.obj['cfg']
    train_set, train_path = _load_split(data, 'train')
    val_path = os.path.join(data, 'val.bin')
    val_set = read_windows(val_path) if os.path.exists(val_path) else WindowSet(num_classes=train_set.num_classes)
    steps, channels = _geometry(train_set, train_path)

    train_cfg = TrainConfig.from_config(
        cfg, seed, epochs=epochs, batch_size=batch_size, lr_start=lr_start, lr_end=lr_end,
        warm_epochs=warm_epochs, focal_gamma=focal_gamma, augment=not no_augment,
    )
    aug = AugmentConfig.from_config(cfg, seed, corrected=corrected, imu_channels=imu_channels)
    if resume:
        checkpoint = load_checkpoint(resume)
        network, state = checkpoint.network, checkpoint.state
        start_epoch = (checkpoint.epoch + 1) if checkpoint.epoch is not None else 0
        history = checkpoint.meta.get('history', [])
    else:
        network = build(_model_config(ctx, arch, steps, channels, train_set.num_classes, expanded), seed)
        state, start_epoch, history = None, 0, []

    os.makedirs(out_dir, exist_ok=True)
    ckpt_path = os.path.join(out_dir, 'model.ckpt')
    settings = {
        'arch': arch, 'model': network.config.to_dict(), 'train': train_cfg.to_dict(),
        'augment': {'snr_min_db': aug.snr_min_db, 'snr_max_db': aug.snr_max_db, 'corrected': aug.corrected},
        'resume': resume, 'start_epoch': start_epoch,
    }
    inputs = [train_path] + ([val_path] if len(val_set) else []) + ([resume] if resume else [])
    with run_manifest(ctx, 'train', out_dir, seed=seed, inputs=inputs, settings=settings) as manifest:
        meta = {'train': train_cfg.to_dict(), 'arch': arch}

        def checkpoint_epoch(epoch, net, opt_state, rows):
            save_checkpoint(ckpt_path, net, opt_state, epoch, meta={**meta, 'history': rows})

        logger.info(
            'training %s: %d parameters (%d trainable), %d windows',
            arch, network.parameter_count(), network.parameter_count(trainable_only=True), len(train_set),
        )
        result = train_loop(
            network, train_set, val_set, train_cfg, aug,
            state=state, start_epoch=start_epoch, history=history, on_epoch_end=checkpoint_epoch,
        )
        if start_epoch >= train_cfg.epochs:
            checkpoint_epoch(train_cfg.epochs - 1, result.network, result.state, result.history)
        _output(manifest, ckpt_path)
        write_rows_csv(result.history, _output(manifest, os.path.join(out_dir, 'history.csv')), HISTORY_COLUMNS)


@cli.command(name='eval')
@click.option('--ckpt', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--data', type=click.Path(exists=True), required=True,
              help='Window file, or a directory holding test.bin.')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False), required=True)
@click.option('--confusion', 'confusion_path', type=click.Path(dir_okay=False), default=None)
@click.option('--xlsx', 'xlsx_path', type=click.Path(dir_okay=False), default=None)
@click.option('--dump-attention', 'attention_dir', type=click.Path(file_okay=False), default=None)
@click.option('--limit', type=click.IntRange(min=1), default=16, show_default=True,
              help='Number of windows whose attention is dumped.')
@click.option('--png', is_flag=True, help='Also render attention heatmaps as PNG.')
@click.pass_context
@semg_command
def evaluate_command(ctx, ckpt, data, report_path, confusion_path, xlsx_path, attention_dir, limit, png):
    """Score a checkpoint on a window set."""
    settings = {'limit': limit, 'png': png}
    window_set, data_path = _load_split(data, 'test')
    with run_manifest(ctx, 'eval', report_path, inputs=[ckpt, data_path], settings=settings) as manifest:
        checkpoint = load_checkpoint(ckpt)
        network = checkpoint.network
        _geometry(window_set, data_path)
        stacked, labels = window_set.stack()
        if labels.max() >= network.config.num_classes:
            raise ValidationError('window labels exceed the model class count', path=data_path)
        gamma = checkpoint.meta.get('train', {}).get('focal_gamma', ctx.obj['cfg'].FOCAL_GAMMA)
        loss, report = score_windows(network, stacked, labels, gamma)
        payload = {
            **report.to_dict(),
            'loss': loss,
            'parameters': network.parameter_count(),
            'trainable_parameters': network.parameter_count(trainable_only=True),
            'model': network.config.to_dict(),
        }
        write_json(payload, _output(manifest, report_path))
        if confusion_path:
            write_confusion_csv(report.confusion, _output(manifest, confusion_path))
        if xlsx_path:
            write_xlsx(eval_sheets(report), _output(manifest, xlsx_path))
        if attention_dir:
            os.makedirs(attention_dir, exist_ok=True)
            count = min(limit, labels.size)
            maps = network.attention_maps(stacked[:count])
            for i in range(count):
                stem = os.path.join(attention_dir, f'window_{i:05d}_label{labels[i]}')
                write_attention_csv(maps[i], _output(manifest, stem + '.csv'))
                if png:
                    write_attention_png(maps[i], _output(manifest, stem + '.png'))
        logger.info('accuracy %.4f balanced %.4f mcc %.4f', report.accuracy, report.balanced_accuracy, report.mcc)


@cli.command()
@click.option('--data', type=click.Path(exists=True, file_okay=False), required=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--seed', type=int, required=True)
@click.option('--suite', type=click.Choice(sorted(ABLATION_SUITES)), default='table3', show_default=True)
@click.option('--arch', 'archs', multiple=True, type=click.Choice(ARCH_CHOICES),
              help='Run these architectures instead of the suite (repeatable).')
@click.option('--runs', type=click.IntRange(min=1), default=1, show_default=True,
              help='Seeds per architecture: seed, seed+1, ...')
@click.option('--epochs', type=click.IntRange(min=1), default=None)
@click.option('--batch', 'batch_size', type=click.IntRange(min=1), default=None)
@click.option('--expanded', type=click.IntRange(min=1), default=None)
@click.option('--workers', type=click.IntRange(min=1), default=None, help='Default: $SEMG_THREADS or CPU count.')
@click.pass_context
@semg_command
def ablate(ctx, data, out_dir, seed, suite, archs, runs, epochs, batch_size, expanded, workers):
    """Train and score every architecture of an ablation suite."""
    cfg = ctx.obj['cfg']
    names = list(archs) or list(ABLATION_SUITES[suite])
    train_set, train_path = _load_split(data, 'train')
    val_set, val_path = _load_split(data, 'val')
    test_path = os.path.join(data, 'test.bin')
    test_set = read_windows(test_path) if os.path.exists(test_path) else WindowSet(num_classes=train_set.num_classes)
    steps, channels = _geometry(train_set, train_path)

    base = _model_config(ctx, FULL_ARCHITECTURE, steps, channels, train_set.num_classes, expanded)
    train_cfg = TrainConfig.from_config(cfg, seed, epochs=epochs, batch_size=batch_size)
    aug = AugmentConfig.from_config(cfg, seed)
    seeds = list(range(seed, seed + runs))
    workers = workers or cfg.THREADS
    os.makedirs(out_dir, exist_ok=True)
    settings = {
        'architectures': names, 'seeds': seeds, 'model': base.to_dict(),
        'train': train_cfg.to_dict(), 'workers': workers,
    }
    inputs = [train_path, val_path] + ([test_path] if len(test_set) else [])
    with run_manifest(ctx, 'ablate', out_dir, seed=seed, inputs=inputs, settings=settings) as manifest:
        rows = run_ablation(names, (train_set, val_set, test_set), base, train_cfg, aug, seeds, workers)
        records = [row.to_dict() for row in rows]
        write_json({'rows': records, 'seeds': seeds}, _output(manifest, os.path.join(out_dir, 'report.json')))
        write_rows_csv(records, _output(manifest, os.path.join(out_dir, 'report.csv')))
        write_xlsx(ablation_sheets(rows), _output(manifest, os.path.join(out_dir, 'report.xlsx')))


@cli.command()
@click.option('--data', type=click.Path(exists=True), required=True,
              help='Window file, or a directory holding test.bin.')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False), required=True)
@click.option('--seed', type=int, required=True)
@click.option('--trials', type=click.IntRange(min=1), default=1000, show_default=True)
@click.option('--classes', type=click.IntRange(min=2), default=None,
              help='Label alphabet size (default: from the window file).')
@click.pass_context
@semg_command
def baselines(ctx, data, report_path, seed, trials, classes):
    """Reference metrics of naive predictors on a window set's labels."""
    window_set, data_path = _load_split(data, 'test')
    num_classes = classes or window_set.num_classes
    settings = {'trials': trials, 'num_classes': num_classes}
    with run_manifest(ctx, 'baselines', report_path, seed=seed, inputs=[data_path], settings=settings) as manifest:
        labels = window_set.labels
        payload = {
            kind: baseline_report(kind, labels, num_classes, trials=trials, seed=seed).to_dict()
            for kind in VALID_BASELINES
        }
        write_json(payload, _output(manifest, report_path))


@cli.command()
@click.option('--in', 'in_path', type=click.Path(dir_okay=False), required=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--seed', type=int, required=True)
@click.option('--arch', type=click.Choice(ARCH_CHOICES), default=FULL_ARCHITECTURE, show_default=True)
@click.option('--epochs', type=click.IntRange(min=1), default=None)
@click.option('--batch', 'batch_size', type=click.IntRange(min=1), default=None)
@click.option('--expanded', type=click.IntRange(min=1), default=None)
@click.option('--channels', type=click.IntRange(min=1), default=None)
@click.option('--classes', type=click.IntRange(min=2), default=None)
@click.option('--rate', type=float, default=None)
@click.pass_context
@semg_command
def crossval(ctx, in_path, out_dir, seed, arch, epochs, batch_size, expanded, channels, classes, rate):
    """Leave-one-repetition-out cross-validation of one architecture."""
    cfg = ctx.obj['cfg']
    spec = _dataset_spec(ctx, channels=channels, num_classes=classes, sample_rate_hz=rate)
    pre = PreprocessConfig.from_config(cfg, spec.sample_rate_hz)
    train_cfg = TrainConfig.from_config(cfg, seed, epochs=epochs, batch_size=batch_size)
    aug = AugmentConfig.from_config(cfg, seed)
    os.makedirs(out_dir, exist_ok=True)
    settings = {'arch': arch, 'train': train_cfg.to_dict(), 'num_classes': spec.num_classes}
    with run_manifest(ctx, 'crossval', out_dir, seed=seed, inputs=[in_path], settings=settings) as manifest:
        recording = load_csv(in_path, spec)
        folds = []
        for rep, train_part, test_part in cross_repetition_folds(recording):
            train_set = build_windows(train_part, spec, pre)
            test_set = build_windows(test_part, spec, pre)
            steps, chans = _geometry(train_set, in_path)
            network = build(_model_config(ctx, arch, steps, chans, spec.num_classes, expanded), seed)
            train_loop(network, train_set, None, train_cfg, aug)
            stacked, labels = test_set.stack()
            if not labels.size:
                raise ValidationError(f'repetition {rep} produced no test windows', path=in_path)
            _, report = score_windows(network, stacked, labels, train_cfg.focal_gamma)
            folds.append({
                'repetition': rep,
                'windows': int(labels.size),
                'accuracy': report.accuracy,
                'balanced_accuracy': report.balanced_accuracy,
                'mcc': report.mcc,
            })
            logger.info('fold %d: acc %.3f mcc %.3f', rep, report.accuracy, report.mcc)
        summary = {}
        for metric in ('accuracy', 'balanced_accuracy', 'mcc'):
            mean, half = mean_confidence_interval([fold[metric] for fold in folds])
            summary[metric] = mean
            summary[f'{metric}_ci'] = half
        write_json({'folds': folds, 'mean': summary}, _output(manifest, os.path.join(out_dir, 'crossval.json')))
        write_rows_csv(folds, _output(manifest, os.path.join(out_dir, 'crossval.csv')))


if __name__ == '__main__':
    cli()
