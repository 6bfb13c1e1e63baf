"""Input checks shared by the estimators and samplers."""

from __future__ import annotations

import numbers

import numpy as np


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_alpha(alpha, *, low=0.0, high=1.0, closed=(True, True), name="alpha"):
    alpha = float(alpha)
    lo_ok = alpha >= low if closed[0] else alpha > low
    hi_ok = alpha <= high if closed[1] else alpha < high
    if not (np.isfinite(alpha) and lo_ok and hi_ok):
        lb = "[" if closed[0] else "("
        rb = "]" if closed[1] else ")"
        raise ValueError(f"{name} must lie in {lb}{low}, {high}{rb}, got {alpha}")
    return alpha


def check_horizons(horizons):
    """Return a sorted, de-duplicated int64 array of horizons >= 1."""
    arr = np.atleast_1d(np.asarray(horizons))
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("horizons must be a non-empty 1-d sequence")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("horizons must be integers")
    arr = np.unique(arr.astype(np.int64))
    if arr[0] < 1:
        raise ValueError("horizons must be >= 1")
    return arr


def check_power_law_data(n, values):
    n = np.asarray(n, dtype=np.float64).reshape(-1)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if n.shape != values.shape:
        raise ValueError("n and values must have the same length")
    if n.size < 4:
        raise ValueError("need at least 4 points for a power-law fit")
    if np.any(n <= 0) or np.any(values <= 0):
        raise ValueError("power-law fit needs strictly positive n and values")
    if not (np.all(np.isfinite(n)) and np.all(np.isfinite(values))):
        raise ValueError("non-finite input")
    return n, values
