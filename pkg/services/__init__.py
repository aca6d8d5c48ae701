"""
Services Package

Pipeline logic: recordings, preprocessing, windowing, augmentation,
training, metrics and ablations.
"""

from .recordings import (
    load_csv,
    write_csv,
    synth_recording,
    effective_repetition,
    split_by_repetition,
    cross_repetition_folds,
    select_gestures,
)

from .dsp import (
    FilterSpec,
    SmootherSpec,
    PreprocessConfig,
    resolve_kernel,
    rectify,
    design_highpass,
    butterworth_highpass,
    moving_average,
    preprocess,
    preprocess_stream,
    preprocess_batch,
)

from .windowing import (
    window_starts,
    slice_windows,
    class_histogram,
    preprocess_windows,
    build_windows,
)

from .augment import (
    AugmentConfig,
    signal_power_db,
    noise_sigma,
    snr_probabilities,
    draw_snr,
    augment_array,
    augment_window,
    augment_batch,
    augment_set,
)

from .metrics import (
    EvalReport,
    confusion_matrix,
    evaluate,
    baseline_report,
    mean_confidence_interval,
)

from .training import (
    TrainConfig,
    OptState,
    Ranger,
    TrainResult,
    HISTORY_COLUMNS,
    rho_t,
    radam_step,
    lookahead_sync,
    lr_schedule,
    score_windows,
    train_loop,
)

from .ablation import AblationRow, run_ablation

__all__ = [
    # Recordings
    'load_csv',
    'write_csv',
    'synth_recording',
    'effective_repetition',
    'split_by_repetition',
    'cross_repetition_folds',
    'select_gestures',
    # DSP
    'FilterSpec',
    'SmootherSpec',
    'PreprocessConfig',
    'resolve_kernel',
    'rectify',
    'design_highpass',
    'butterworth_highpass',
    'moving_average',
    'preprocess',
    'preprocess_stream',
    'preprocess_batch',
    # Windowing
    'window_starts',
    'slice_windows',
    'class_histogram',
    'preprocess_windows',
    'build_windows',
    # Augmentation
    'AugmentConfig',
    'signal_power_db',
    'noise_sigma',
    'snr_probabilities',
    'draw_snr',
    'augment_array',
    'augment_window',
    'augment_batch',
    'augment_set',
    # Metrics
    'EvalReport',
    'confusion_matrix',
    'evaluate',
    'baseline_report',
    'mean_confidence_interval',
    # Training
    'TrainConfig',
    'OptState',
    'Ranger',
    'TrainResult',
    'HISTORY_COLUMNS',
    'rho_t',
    'radam_step',
    'lookahead_sync',
    'lr_schedule',
    'score_windows',
    'train_loop',
    # Ablation
    'AblationRow',
    'run_ablation',
]
