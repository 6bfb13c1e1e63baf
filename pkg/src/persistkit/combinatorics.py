"""The universal persistence sequence g(n) and the identities it satisfies.

``g(n) = C(2n, n) / 4**n`` is the probability that a symmetric, atomless
random walk (or any exchangeable sign-invariant sequence without ties) stays
positive for ``n`` steps. Exact values are :class:`fractions.Fraction`;
float tables come from the multiplicative recurrence so that ``n`` can go to
``10**6`` and beyond without factorial overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "PersistenceSequence",
    "g_exact",
    "g_exact_binomial",
    "g_float_table",
    "g_lookup",
    "g_bounds",
    "convolution_identity_residual",
    "ladder_epoch_pmf",
    "ladder_epoch_pmf_series",
    "ladder_epoch_pmf_differences",
]


def _check_nonneg_int(n, name="n"):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(n).__name__}")
    if n < 0:
        raise ValueError(f"{name} must be >= 0, got {n}")
    return int(n)


@lru_cache(maxsize=None)
def _g_recurrence_table(n_max: int) -> tuple[Fraction, ...]:
    vals = [Fraction(1)]
    for k in range(1, n_max + 1):
        vals.append(vals[-1] * Fraction(2 * k - 1, 2 * k))
    return tuple(vals)


def g_exact(n: int) -> Fraction:
    """Exact ``g(n)`` via ``g(n) = g(n-1) * (1 - 1/(2n))``.

    >>> g_exact(2)
    Fraction(3, 8)
    """
    n = _check_nonneg_int(n)
    if n <= 4096:
        return _g_recurrence_table(n)[n]
    return g_exact_binomial(n)


def g_exact_binomial(n: int) -> Fraction:
    """Exact ``g(n)`` computed independently as ``C(2n, n) / 4**n``."""
    n = _check_nonneg_int(n)
    return Fraction(math.comb(2 * n, n), 4**n)


def g_float_table(n_max: int) -> np.ndarray:
    """Float64 values ``g(0), ..., g(n_max)`` by cumulative product."""
    n_max = _check_nonneg_int(n_max, "n_max")
    k = np.arange(1, n_max + 1, dtype=np.float64)
    out = np.empty(n_max + 1)
    out[0] = 1.0
    out[1:] = np.cumprod(1.0 - 0.5 / k)
    return out


def g_lookup(table: np.ndarray, m) -> np.ndarray:
    """Evaluate ``g`` at integer array ``m`` with ``g(m) = 0`` for ``m < 0``."""
    m = np.asarray(m)
    out = np.zeros(m.shape)
    ok = m >= 0
    if np.any(m[ok] >= len(table)):
        raise ValueError("g table too short for requested argument")
    out[ok] = table[m[ok]]
    return out


def g_bounds(n: int) -> tuple[float, float]:
    """Return ``(1/sqrt(pi (n + 1/2)), 1/sqrt(pi n))``, which bracket ``g(n)``.

    Valid for ``n >= 1`` only.
    """
    n = _check_nonneg_int(n)
    if n == 0:
        raise ValueError("bounds hold for n >= 1 only")
    return 1.0 / math.sqrt(math.pi * (n + 0.5)), 1.0 / math.sqrt(math.pi * n)


def convolution_identity_residual(n_max: int) -> Fraction:
    """Max over ``1 <= n <= n_max`` of ``|1 - sum_l g(l) g(n-l)|``, exactly.

    The residual is zero because ``sum g(n) x**n = (1 - x)**(-1/2)``.
    """
    n_max = _check_nonneg_int(n_max, "n_max")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    # Work with integer numerators over 4**n: g(l) g(n-l) = C(2l,l) C(2n-2l,n-l) / 4**n
    cb = [math.comb(2 * k, k) for k in range(n_max + 1)]
    worst = Fraction(0)
    for n in range(1, n_max + 1):
        s = sum(cb[l] * cb[n - l] for l in range(n + 1))
        resid = abs(Fraction(4**n - s, 4**n))
        worst = max(worst, resid)
    return worst


def ladder_epoch_pmf_series(n_max: int) -> list[Fraction]:
    """Taylor coefficients ``[s**n](1 - sqrt(1 - s))`` for ``n = 1..n_max``.

    Uses the binomial series ``sqrt(1 - s) = sum_n C(1/2, n) (-s)**n`` with
    ``C(1/2, n)`` built by its own ratio recurrence.
    """
    n_max = _check_nonneg_int(n_max, "n_max")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    half = Fraction(1, 2)
    coef = Fraction(1)  # C(1/2, 0)
    out = []
    for n in range(1, n_max + 1):
        coef = coef * (half - (n - 1)) / n
        out.append(-coef * (-1) ** n)
    return out


def ladder_epoch_pmf_differences(n_max: int) -> list[Fraction]:
    """``P(T_1 = n) = g(n-1) - g(n)`` for ``n = 1..n_max``."""
    n_max = _check_nonneg_int(n_max, "n_max")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    g = _g_recurrence_table(n_max)
    return [g[n - 1] - g[n] for n in range(1, n_max + 1)]


def ladder_epoch_pmf(n_max: int) -> list[Fraction]:
    """Law of the first weak ladder epoch of a symmetric atomless walk.

    Both the series and the g-difference routes are evaluated; any
    disagreement raises ``ArithmeticError``.
    """
    series = ladder_epoch_pmf_series(n_max)
    diffs = ladder_epoch_pmf_differences(n_max)
    for n, (a, b) in enumerate(zip(series, diffs), start=1):
        if a != b:
            raise ArithmeticError(f"ladder pmf mismatch at n={n}: {a} != {b}")
    return series


@dataclass(frozen=True)
class PersistenceSequence:
    """Table of ``g(0..n_max)`` as exact rationals and floats.

    Immutable after construction; ``__post_init__`` checks the recurrence
    against the binomial formula and the float table against the exact one.
    """

    n_max: int
    values: tuple[Fraction, ...] = field(init=False, repr=False)
    float_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n_max = _check_nonneg_int(self.n_max, "n_max")
        vals = _g_recurrence_table(n_max)
        object.__setattr__(self, "values", vals)
        fv = g_float_table(n_max)
        fv.setflags(write=False)
        object.__setattr__(self, "float_values", fv)

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def __len__(self) -> int:
        return self.n_max + 1

    def verify(self) -> dict:
        """Check the table invariants; returns a dict of booleans."""
        rec = all(
            self.values[n] == self.values[n - 1] * (1 - Fraction(1, 2 * n))
            for n in range(1, self.n_max + 1)
        )
        binom = all(
            self.values[n] == g_exact_binomial(n) for n in range(self.n_max + 1)
        )
        bounds = True
        for n in range(1, self.n_max + 1):
            lo, hi = g_bounds(n)
            if not (lo <= float(self.values[n]) <= hi):
                bounds = False
                break
        return {
            "g0_is_one": self.values[0] == 1,
            "recurrence": rec,
            "binomial": binom,
            "bounds": bounds,
        }
