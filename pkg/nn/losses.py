"""
Focal Loss

FL = -(1 - p_target)^gamma * log(p_target), averaged over the batch, with the
gradient taken wrt the logits that produced the softmax probabilities.
"""

import logging

import numpy as np

from models import ValidationError

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-12


def focal_loss(probs, targets, gamma=2.0):
    """
    Focal loss of softmax outputs.

    Args:
        probs: (K,) or (N, K) class probabilities
        targets: label or (N,) labels
        gamma: focusing exponent; 0 gives cross-entropy

    Returns:
        (loss, grad_logits, clamped) where loss is the batch mean, grad_logits
        has the shape of probs and clamped counts target probabilities raised
        to the 1e-12 floor
    """
    single = np.ndim(probs) == 1
    probs = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    targets = np.atleast_1d(np.asarray(targets, dtype=np.int64))
    if gamma < 0:
        raise ValidationError(f'focal gamma must be >= 0, got {gamma}')
    if targets.shape != (probs.shape[0],):
        raise ValidationError(f'{targets.size} targets for {probs.shape[0]} probability rows')
    if targets.size and (targets.min() < 0 or targets.max() >= probs.shape[1]):
        raise ValidationError(f'target labels must lie in [0, {probs.shape[1]})')

    rows = np.arange(probs.shape[0])
    p = probs[rows, targets]
    low = p < PROB_FLOOR
    clamped = int(low.sum())
    if clamped:
        logger.warning('clamped %d target probabilities to %g', clamped, PROB_FLOOR)
    p = np.where(low, PROB_FLOOR, p)
    log_p = np.log(p)
    miss = 1.0 - p
    losses = -(miss ** gamma) * log_p

    # coef = p * dL/dp, so dL/dz = coef * (onehot - probs)
    if gamma == 0:
        coef = -np.ones_like(p)
    else:
        with np.errstate(divide='ignore', invalid='ignore'):
            focus = np.where(miss > 0, gamma * p * log_p * miss ** (gamma - 1.0), 0.0)
        coef = focus - miss ** gamma
    onehot = np.zeros_like(probs)
    onehot[rows, targets] = 1.0
    n = max(probs.shape[0], 1)
    grad = coef[:, None] * (onehot - probs) / n

    loss = float(losses.mean()) if losses.size else 0.0
    return loss, (grad[0] if single else grad), clamped
