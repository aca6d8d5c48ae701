"""
SNR Augmentation Service

Additive Gaussian noise calibrated per channel to a target signal-to-noise
ratio in decibels. Rest windows are never augmented.
"""

import logging
from dataclasses import dataclass

import numpy as np

from constants import REST_LABEL
from models import ValidationError, WindowSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentConfig:
    """
    SNR range (integer dB), rest label and noise sign convention.

    corrected=False uses noise power P_n = SNR - P_s; corrected=True uses
    P_n = P_s - SNR so the output SNR matches the target.
    """
    snr_min_db: int = 1
    snr_max_db: int = 30
    rest_label: int = REST_LABEL
    seed: int = 0
    corrected: bool = False
    imu_channels: int = 0
    augment_imu: bool = False
    extra_copies: int = 0

    def __post_init__(self):
        if not self.snr_min_db < self.snr_max_db:
            raise ValidationError(
                f'snr_min_db ({self.snr_min_db}) must be below snr_max_db ({self.snr_max_db})'
            )
        if self.extra_copies < 0:
            raise ValidationError('extra_copies must be >= 0')

    @classmethod
    def from_config(cls, cfg, seed, **overrides):
        values = dict(
            snr_min_db=cfg.SNR_MIN_DB,
            snr_max_db=cfg.SNR_MAX_DB,
            seed=seed,
            corrected=cfg.CORRECTED_SNR,
            extra_copies=cfg.AUGMENT_EXTRA_COPIES,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def signal_power_db(s):
    """
    Per-channel power 10 log10(sum(S_t^2) / T) in dB.

    An all-zero channel yields -inf; callers skip it.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] < 1:
        raise ValidationError(f'expected a T x C matrix with T >= 1, got shape {s.shape}')
    power = np.mean(s ** 2, axis=0)
    with np.errstate(divide='ignore'):
        return 10.0 * np.log10(power)


def noise_sigma(p_s_db, snr_db, corrected=False):
    """
    Noise standard deviation for a channel of power p_s_db at a target SNR.

    P_n = SNR - P_s (or P_s - SNR when corrected), sigma = sqrt(10^(P_n / 10)).
    """
    p_n = (p_s_db - snr_db) if corrected else (snr_db - p_s_db)
    return np.sqrt(10.0 ** (np.asarray(p_n, dtype=np.float64) / 10.0))


def snr_values(cfg):
    return np.arange(cfg.snr_min_db, cfg.snr_max_db + 1, dtype=np.int64)


def snr_probabilities(cfg):
    """Selection probability of each integer SNR, proportional to its value."""
    values = snr_values(cfg).astype(np.float64)
    if values.min() <= 0:
        raise ValidationError('SNR support must be positive for value-proportional sampling')
    return values / values.sum()


def draw_snr(cfg, rng, size=None):
    """Draw integer SNR values with probability proportional to the value."""
    return rng.choice(snr_values(cfg), size=size, p=snr_probabilities(cfg))


def _noise_channels(channels, cfg):
    """Mask of channels that receive noise (trailing IMU channels exempt by default)."""
    mask = np.ones(channels, dtype=bool)
    if cfg.imu_channels and not cfg.augment_imu:
        mask[channels - cfg.imu_channels:] = False
    return mask


def augment_array(data, snr_db, cfg, rng):
    """Add calibrated noise to one T x C array at the given SNR."""
    p_s = signal_power_db(data)
    sigma = noise_sigma(p_s, snr_db, corrected=cfg.corrected)
    skip = ~np.isfinite(p_s) | ~_noise_channels(data.shape[1], cfg)
    sigma = np.where(skip, 0.0, sigma)
    return data + rng.standard_normal(data.shape) * sigma


def augment_window(window, cfg, rng):
    """Return the window with SNR noise added; rest windows come back unchanged."""
    if window.label == cfg.rest_label:
        return window
    snr = draw_snr(cfg, rng)
    return window.with_data(augment_array(window.data, snr, cfg, rng))


def augment_batch(data, labels, cfg, rng):
    """
    Augment the non-rest rows of an (N, T, C) batch with fresh noise.

    All SNRs are drawn first, then all noise; rest rows are copied unchanged.
    """
    out = np.array(data, dtype=np.float64, copy=True)
    rows = np.flatnonzero(np.asarray(labels) != cfg.rest_label)
    if rows.size == 0:
        return out
    snr = draw_snr(cfg, rng, size=rows.size)
    selected = out[rows]
    with np.errstate(divide='ignore'):
        p_s = 10.0 * np.log10(np.mean(selected ** 2, axis=1))
    sigma = noise_sigma(p_s, snr[:, None], corrected=cfg.corrected)
    skip = ~np.isfinite(p_s) | ~_noise_channels(out.shape[2], cfg)[None, :]
    sigma = np.where(skip, 0.0, sigma)
    out[rows] = selected + rng.standard_normal(selected.shape) * sigma[:, None, :]
    return out


def augment_set(window_set, cfg, rng):
    """
    Augment every non-rest window once, then append extra_copies further
    independently augmented copies of each non-rest window.
    """
    windows = [augment_window(w, cfg, rng) for w in window_set]
    for _ in range(cfg.extra_copies):
        windows.extend(augment_window(w, cfg, rng) for w in window_set if w.label != cfg.rest_label)
    skipped = sum(
        int(np.any(~np.isfinite(signal_power_db(w.data))))
        for w in window_set if w.label != cfg.rest_label
    )
    if skipped:
        logger.warning('%d windows had zero-power channels left unaugmented', skipped)
    return WindowSet(
        windows=windows,
        num_classes=window_set.num_classes,
        status=window_set.status,
        warnings=list(window_set.warnings),
    )
