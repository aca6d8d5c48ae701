"""
Central-difference gradient checking.
"""

import numpy as np


def numerical_gradient(f, x, h=1e-5):
    """
    Central-difference gradient of scalar f() wrt array x, perturbed in place.

    f takes no arguments and reads x through closure, so the same helper
    checks inputs and layer parameters alike.
    """
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=['multi_index'])
    for _ in it:
        idx = it.multi_index
        original = x[idx]
        x[idx] = original + h
        plus = f()
        x[idx] = original - h
        minus = f()
        x[idx] = original
        grad[idx] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic, numeric):
    """||a - n|| / max(||a|| + ||n||, tiny)."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / denom)


def gradient_check(f, x, analytic, h=1e-5):
    """Norm-relative error between an analytic gradient and central differences."""
    return relative_error(analytic, numerical_gradient(f, x, h))
