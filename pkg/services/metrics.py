"""
Metrics Service

Confusion matrix, accuracy, class-balanced accuracy, multiclass Matthews
correlation and the naive reference baselines.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from constants import REST_LABEL, VALID_BASELINES
from models import ValidationError


@dataclass
class EvalReport:
    """Metrics plus the (summed) confusion matrix they were computed from."""
    accuracy: float
    balanced_accuracy: float
    mcc: float
    confusion: np.ndarray = field(repr=False)
    trials: int = 1

    @property
    def num_classes(self):
        return int(self.confusion.shape[0])

    @property
    def total(self):
        return int(self.confusion.sum())

    def to_dict(self):
        return {
            'accuracy': float(self.accuracy),
            'balanced_accuracy': float(self.balanced_accuracy),
            'mcc': float(self.mcc),
            'trials': int(self.trials),
            'num_classes': self.num_classes,
            'num_windows': self.total // max(self.trials, 1),
            'confusion': self.confusion.astype(np.int64).tolist(),
        }


def confusion_matrix(preds, truth, num_classes):
    """K x K counts, rows = true label, columns = predicted label."""
    preds = np.asarray(preds, dtype=np.int64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if preds.shape != truth.shape:
        raise ValidationError(f'{preds.size} predictions for {truth.size} labels')
    for name, labels in (('prediction', preds), ('truth', truth)):
        if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
            raise ValidationError(f'{name} labels must lie in [0, {num_classes})')
    flat = np.bincount(truth * num_classes + preds, minlength=num_classes * num_classes)
    return flat.reshape(num_classes, num_classes)


def accuracy_from_confusion(confusion):
    total = confusion.sum()
    return float(np.trace(confusion) / total) if total else 0.0


def balanced_accuracy_from_confusion(confusion):
    """Mean recall over the classes that occur in the truth labels."""
    support = confusion.sum(axis=1)
    present = support > 0
    if not present.any():
        return 0.0
    return float(np.mean(np.diag(confusion)[present] / support[present]))


def mcc_from_confusion(confusion):
    """
    Multiclass Matthews correlation (covariance form).

    (c s - sum_k p_k t_k) / sqrt((s^2 - sum_k p_k^2)(s^2 - sum_k t_k^2)),
    with c correct, s total, p predicted and t true class totals; 0 when the
    denominator vanishes.
    """
    confusion = confusion.astype(np.float64)
    correct = np.trace(confusion)
    total = confusion.sum()
    predicted = confusion.sum(axis=0)
    true = confusion.sum(axis=1)
    numerator = correct * total - predicted @ true
    denominator = np.sqrt((total ** 2 - predicted @ predicted) * (total ** 2 - true @ true))
    if denominator == 0:
        return 0.0
    return float(np.clip(numerator / denominator, -1.0, 1.0))


def report_from_confusion(confusion, trials=1):
    return EvalReport(
        accuracy=accuracy_from_confusion(confusion),
        balanced_accuracy=balanced_accuracy_from_confusion(confusion),
        mcc=mcc_from_confusion(confusion),
        confusion=confusion,
        trials=trials,
    )


def evaluate(preds, truth, num_classes):
    """
    Score predictions against truth.

    Raises:
        ValidationError: length mismatch, labels out of range or no labels
    """
    confusion = confusion_matrix(preds, truth, num_classes)
    if confusion.sum() == 0:
        raise ValidationError('nothing to evaluate: no labels given')
    return report_from_confusion(confusion)


def _baseline_predictions(kind, truth, num_classes, rng):
    n = truth.size
    if kind == 'all-zeros':
        return np.full(n, REST_LABEL, dtype=np.int64)
    if kind == 'all-ones':
        return np.full(n, 1, dtype=np.int64)
    if kind == 'unweighted-random':
        return rng.integers(0, num_classes, size=n)
    cumulative = np.cumsum(np.bincount(truth, minlength=num_classes)) / n
    draws = np.searchsorted(cumulative, rng.random(n), side='right')
    return np.minimum(draws, num_classes - 1)


def baseline_report(kind, truth, num_classes, trials=1000, seed=0):
    """
    Reference metrics of a naive predictor.

    Random kinds average each metric over `trials` seeded draws and sum the
    confusion matrices; constant kinds are evaluated once.
    """
    if kind not in VALID_BASELINES:
        raise ValidationError(f'baseline must be one of {", ".join(VALID_BASELINES)}, got {kind!r}')
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if truth.size == 0:
        raise ValidationError('baseline needs at least one truth label')
    if kind == 'all-ones' and num_classes < 2:
        raise ValidationError('all-ones baseline needs at least two classes')
    if trials < 1:
        raise ValidationError('trials must be >= 1')

    rng = np.random.default_rng(seed)
    if kind in ('all-zeros', 'all-ones'):
        trials = 1
    scores = np.zeros((trials, 3))
    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    for trial in range(trials):
        trial_confusion = confusion_matrix(_baseline_predictions(kind, truth, num_classes, rng), truth, num_classes)
        confusion += trial_confusion
        report = report_from_confusion(trial_confusion)
        scores[trial] = (report.accuracy, report.balanced_accuracy, report.mcc)
    accuracy, balanced, mcc = scores.mean(axis=0)
    return EvalReport(
        accuracy=float(accuracy),
        balanced_accuracy=float(balanced),
        mcc=float(mcc),
        confusion=confusion,
        trials=trials,
    )


def mean_confidence_interval(values, confidence=0.95):
    """Mean and normal-approximation half-width of a sample; half-width 0 for one value."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValidationError('no values to summarize')
    mean = float(values.mean())
    if values.size == 1:
        return mean, 0.0
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    return mean, float(z * values.std(ddof=1) / np.sqrt(values.size))
