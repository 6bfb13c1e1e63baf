"""Decay envelopes for persistence of integrated chains, and power-law fits.

Normalizations follow the return-time tail ``P(tau_1 > n) ~ ell(n) n**-alpha``:

* ``b_n = n / mu(n)`` (alpha = 1), ``n**alpha / ell(n)`` (0 < alpha < 1),
  ``1 / ell(n)`` (alpha = 0), ``n`` (positive recurrent);
* ``E[g(L_n)] ~ c_alpha / sqrt(pi b_n)`` with ``c_1 = 1``, ``c_0 = sqrt(pi)``
  and ``c_alpha = Gamma(1-alpha)**(1/2) E[Z**(alpha/2)]`` otherwise, where ``Z``
  is one-sided stable with Laplace transform ``exp(-t**alpha)``;
* ``E[g(L_n) 1{X_n = 0}] ~ period * c'_alpha n**(alpha/2 - 1) ell(n)**(-1/2) / sqrt(pi)``
  with ``c'_alpha = alpha Gamma(1-alpha)**(-1/2) E[Z**(-alpha/2)]``.

The persistence probability sits between ``p0 (1 - p0)`` times and ``1``
times the ``E[g(L_n)]`` envelope (``p0`` times for bridges).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_alpha, check_power_law_data
from .sampling import fractional_moment, sample_one_sided_stable

__all__ = [
    "AsymptoticsSpec",
    "PowerLawFit",
    "PowerLawResult",
    "b_n",
    "c_alpha",
    "c_prime_alpha",
    "kappa_alpha",
    "c_alpha_monte_carlo",
    "c_prime_alpha_monte_carlo",
    "mu_truncated",
    "fit_power_law",
    "envelope",
]

_REGIMES = ("positive_recurrent", "alpha_1", "alpha_in_01", "alpha_0")


def _regime_for(alpha: float) -> str:
    if alpha == 1.0:
        return "alpha_1"
    if alpha == 0.0:
        return "alpha_0"
    return "alpha_in_01"


@dataclass(frozen=True)
class AsymptoticsSpec:
    """Inputs describing a predicted decay envelope.

    ``ell`` is the slowly varying factor of the return-time tail (default
    constant 1). ``mean_return_time`` is required in the positive recurrent
    regime, ``mu`` (callable ``n -> mu(n)`` or table indexed by ``n``) when
    ``alpha = 1``. ``period`` is 2 for chains that can only return at even
    times. ``p0`` is ``P(X_1 > 0)``.
    """

    alpha: float = 0.5
    ell: Callable[[float], float] | None = None
    regime: str | None = None
    p0: float = 0.5
    mean_return_time: float | None = None
    mu: Callable | np.ndarray | None = None
    period: int = 1

    def __post_init__(self):
        check_alpha(self.alpha)
        regime = self.regime or _regime_for(float(self.alpha))
        if regime not in _REGIMES:
            raise ValueError(f"unknown regime {regime!r}")
        if regime != "positive_recurrent" and regime != _regime_for(float(self.alpha)):
            raise ValueError(f"regime {regime} inconsistent with alpha={self.alpha}")
        if regime == "positive_recurrent" and not (self.mean_return_time and self.mean_return_time > 0):
            raise ValueError("positive recurrent envelopes need mean_return_time")
        if not 0 < self.p0 <= 0.5:
            raise ValueError("p0 must lie in (0, 1/2]")
        if self.period not in (1, 2):
            raise ValueError("period must be 1 or 2")
        object.__setattr__(self, "regime", regime)

    def ell_at(self, n) -> float:
        if self.ell is None:
            return 1.0
        v = float(self.ell(n))
        if not v > 0:
            raise ValueError(f"ell({n}) must be positive, got {v}")
        return v

    def mu_at(self, n) -> float:
        if self.mu is None:
            raise ValueError("alpha = 1 needs the truncated-mean table mu")
        if callable(self.mu):
            return float(self.mu(n))
        tab = np.asarray(self.mu)
        if int(n) >= tab.size:
            raise ValueError("mu table too short")
        return float(tab[int(n)])


def b_n(spec: AsymptoticsSpec, n, mu=None) -> float:
    """Normalization of the local time ``L_n``; see module docstring."""
    n = float(n)
    if n <= 0:
        raise ValueError("n must be positive")
    if spec.regime == "positive_recurrent":
        return n
    if spec.regime == "alpha_1":
        if mu is not None:
            spec = AsymptoticsSpec(alpha=1.0, ell=spec.ell, p0=spec.p0, mu=mu, period=spec.period)
        return n / spec.mu_at(n)
    if spec.regime == "alpha_0":
        return 1.0 / spec.ell_at(n)
    return n**spec.alpha / spec.ell_at(n)


def kappa_alpha(alpha: float) -> float:
    """``Gamma(1 - alpha)**(1/alpha)``: ``tau_n / a_n -> kappa_alpha Z_alpha``."""
    alpha = check_alpha(alpha, closed=(False, False))
    return math.exp(gammaln(1.0 - alpha) / alpha)


def c_alpha(alpha: float) -> float:
    alpha = check_alpha(alpha)
    if alpha == 1.0:
        return 1.0
    if alpha == 0.0:
        return math.sqrt(math.pi)
    return math.exp(0.5 * gammaln(1.0 - alpha)) * fractional_moment(alpha, alpha / 2.0)


def c_prime_alpha(alpha: float) -> float:
    """``alpha Gamma(1-alpha)**(-1/2) E[Z**(-alpha/2)]`` for ``0 < alpha < 1``."""
    alpha = check_alpha(alpha, closed=(False, False))
    return alpha * math.exp(-0.5 * gammaln(1.0 - alpha)) * fractional_moment(alpha, -alpha / 2.0)


def c_alpha_monte_carlo(alpha: float, n_samples: int, rng) -> tuple[float, float]:
    """Monte-Carlo ``Gamma(1-alpha)**(1/2) mean(Z**(alpha/2))`` and its standard error."""
    alpha = check_alpha(alpha, closed=(False, False))
    z = sample_one_sided_stable(alpha, rng, size=n_samples)
    v = np.exp(0.5 * gammaln(1.0 - alpha)) * z ** (alpha / 2.0)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(n_samples))


def c_prime_alpha_monte_carlo(alpha: float, n_samples: int, rng) -> tuple[float, float]:
    alpha = check_alpha(alpha, closed=(False, False))
    z = sample_one_sided_stable(alpha, rng, size=n_samples)
    v = alpha * np.exp(-0.5 * gammaln(1.0 - alpha)) * z ** (-alpha / 2.0)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(n_samples))


def mu_truncated(tau_pmf, n: int) -> float:
    """``E[tau_1 1{tau_1 <= n}] = sum_{k <= n} k P(tau_1 = k)``.

    ``tau_pmf[k]`` is ``P(tau_1 = k)`` (index 0 unused), or an object with a
    ``pmf`` attribute such as :class:`persistkit.chains.Tau1Tail`.
    """
    pmf = np.asarray(getattr(tau_pmf, "pmf", tau_pmf), dtype=np.float64)
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n >= pmf.size:
        raise ValueError(f"pmf table covers k <= {pmf.size - 1}, need {n}")
    k = np.arange(n + 1)
    return float(np.sum(k * pmf[: n + 1]))


class PowerLawFit(RegressorMixin, BaseEstimator):
    """Weighted least squares of ``log(value)`` on ``log(n)``.

    Parameters
    ----------
    weighted : bool, default=True
        Use ``sample_weight`` (inverse variances of ``log(value)``) when given.

    Attributes
    ----------
    exponent_ : float
    intercept_ : float
        ``log`` of the prefactor.
    exponent_stderr_ : float
    """

    def __init__(self, weighted=True):
        self.weighted = weighted

    def fit(self, X, y, sample_weight=None):
        n = np.asarray(X, dtype=np.float64)
        if n.ndim == 2:
            if n.shape[1] != 1:
                raise ValueError("PowerLawFit expects a single feature (the horizon n)")
            n = n[:, 0]
        n, y = check_power_law_data(n, y)
        lx = np.log(n)
        ly = np.log(y)
        A = np.column_stack([lx, np.ones_like(lx)])
        w = None
        if self.weighted and sample_weight is not None:
            w = np.asarray(sample_weight, dtype=np.float64).reshape(-1)
            if w.shape != lx.shape or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("sample_weight must be finite, nonnegative, one per point")
            if np.count_nonzero(w) < 3:
                w = None
        if w is None:
            coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
            resid = ly - A @ coef
            dof = max(lx.size - 2, 1)
            s2 = float(resid @ resid) / dof
            cov = s2 * np.linalg.inv(A.T @ A)
        else:
            Aw = A * w[:, None]
            cov = np.linalg.inv(A.T @ Aw)
            coef = cov @ (Aw.T @ ly)
        self.exponent_ = float(coef[0])
        self.intercept_ = float(coef[1])
        self.exponent_stderr_ = float(math.sqrt(max(cov[0, 0], 0.0)))
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "exponent_")
        n = np.asarray(X, dtype=np.float64)
        if n.ndim == 2:
            n = n[:, 0]
        return np.exp(self.intercept_) * n**self.exponent_


@dataclass(frozen=True)
class PowerLawResult:
    exponent: float
    stderr: float
    intercept: float


def fit_power_law(points) -> PowerLawResult:
    """Fit ``value ~ C n**exponent`` to ``(n, value, half_width)`` triples.

    ``half_width`` is a 3-sigma confidence half-width; the weight of each
    point is ``(value / (half_width / 3))**2``. All-zero half-widths give an
    unweighted fit.
    """
    pts = [tuple(p) for p in points]
    if any(len(p) != 3 for p in pts):
        raise ValueError("points must be (n, value, half_width) triples")
    n = np.array([p[0] for p in pts], dtype=np.float64)
    v = np.array([p[1] for p in pts], dtype=np.float64)
    hw = np.array([p[2] for p in pts], dtype=np.float64)
    if np.any(hw < 0):
        raise ValueError("half widths must be >= 0")
    n, v = check_power_law_data(n, v)
    weights = None
    if np.all(hw > 0):
        weights = (3.0 * v / hw) ** 2
    elif np.any(hw > 0):
        raise ValueError("half widths must be all zero or all positive")
    model = PowerLawFit().fit(n, v, sample_weight=weights)
    return PowerLawResult(model.exponent_, model.exponent_stderr_, model.intercept_)


def envelope(spec: AsymptoticsSpec, n, kind: str = "persistence", *, local_tail_condition: bool = False):
    """Asymptotic ``(lower, upper)`` band for persistence at horizon ``n``.

    ``persistence``: ``upper ~ E[g(L_n)]``, ``lower = p0 (1 - p0) upper``.
    ``bridge``: ``upper ~ E[g(L_n) 1{X_n = 0}]``, ``lower = p0 upper``; for
    ``alpha <= 2/3`` the caller must assert the local tail bound
    ``P(tau_1 = n) <= C ell(n) n**-(1 + alpha)`` via ``local_tail_condition``.
    """
    if kind not in ("persistence", "bridge"):
        raise ValueError("kind must be 'persistence' or 'bridge'")
    n = float(n)
    p0 = spec.p0
    if spec.regime == "positive_recurrent":
        m = spec.mean_return_time
        if kind == "persistence":
            upper = math.sqrt(m) / math.sqrt(math.pi * n)
            return p0 * (1 - p0) * upper, upper
        upper = spec.period / math.sqrt(math.pi * n * m)
        return p0 * upper, upper
    if kind == "persistence":
        upper = c_alpha(spec.alpha) / math.sqrt(math.pi * b_n(spec, n))
        return p0 * (1 - p0) * upper, upper
    a = spec.alpha
    if not 0.0 < a < 1.0:
        raise ValueError("bridge envelope is only available for 0 < alpha < 1")
    if a <= 2.0 / 3.0 and not local_tail_condition:
        raise ValueError(
            "bridge envelope for alpha <= 2/3 needs local_tail_condition=True "
            "(P(tau_1 = n) <= C ell(n) n^-(1+alpha))"
        )
    upper = spec.period * c_prime_alpha(a) * n ** (a / 2.0 - 1.0) * spec.ell_at(n) ** -0.5 / math.sqrt(math.pi)
    return p0 * upper, upper
