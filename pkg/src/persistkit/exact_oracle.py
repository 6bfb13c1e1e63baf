"""Exact enumeration and dynamic-programming oracles.

Everything in this module is exact: weight vectors are rationals rescaled to
integers, probabilities are :class:`~fractions.Fraction`. Floats only appear
in the large-``n`` helpers for the simple random walk local-time law, which
are named ``*_float``.

Conventions
-----------
A sign-permutation outcome is a pair ``(eps, sigma)`` with ``eps`` a tuple
of ``+1/-1`` and ``sigma`` a tuple of 0-based indices; it produces the
increments ``xi_i = eps_i * x[sigma_i]``. "Strict" persistence means every
prefix sum ``S_1..S_n`` is ``> 0``; "weak" means ``>= 0``. ``W`` is the first
index in ``0..n`` at which ``S_0 = 0, S_1, ..., S_n`` attains its maximum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.special import gammaln

from .combinatorics import g_exact, g_float_table

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "WeightVector",
    "SignPermutationLaw",
    "ExactPersistenceResult",
    "CounterexampleB",
    "enumerate_persistence",
    "w_distribution_check",
    "srw_persistence_dp",
    "srw_persistence_profile",
    "srw_persistence_enumeration",
    "counterexample_a",
    "counterexample_a_printed_value",
    "counterexample_b_search",
    "srw_functional_enumeration",
    "srw_local_time_pmf",
    "srw_local_time_expectations_float",
    "fraction_to_json",
    "fraction_from_json",
    "random_weight_vector",
]

DEFAULT_ENUMERATION_CAP = 8
SRW_DP_CAP = 10_000
_INT64_SAFE = 2**62


def fraction_to_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def fraction_from_json(d: Mapping) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("booleans are not magnitudes")
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError("magnitudes must be finite")
        return Fraction(float(v))
    return Fraction(v)


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative magnitudes ``(x_1, ..., x_n)`` stored as exact rationals."""

    magnitudes: tuple[Fraction, ...]

    def __post_init__(self):
        mags = tuple(_as_fraction(v) for v in self.magnitudes)
        if not mags:
            raise ValueError("weight vector must be non-empty")
        if any(m < 0 for m in mags):
            raise ValueError("magnitudes must be >= 0")
        object.__setattr__(self, "magnitudes", mags)

    @property
    def n(self) -> int:
        return len(self.magnitudes)

    def __len__(self):
        return self.n

    def scaled_integers(self) -> tuple[list[int], int]:
        """Integers ``k_i`` and a scale ``D`` with ``x_i = k_i / D``."""
        den = 1
        for m in self.magnitudes:
            den = math.lcm(den, m.denominator)
        return [int(m * den) for m in self.magnitudes], den

    def subset_sums(self) -> list[int]:
        """All ``2**n`` subset sums, in scaled-integer units."""
        ints, _ = self.scaled_integers()
        sums = [0]
        for k in ints:
            sums = sums + [s + k for s in sums]
        return sums

    @property
    def satisfies_H(self) -> bool:
        """True when all ``2**n`` subset sums are pairwise distinct."""
        s = sorted(self.subset_sums())
        return all(b > a for a, b in zip(s, s[1:]))

    def __str__(self):
        return "(" + ", ".join(str(m) for m in self.magnitudes) + ")"


def _signs_gray(n: int) -> np.ndarray:
    """All sign vectors in reflected Gray-code order, shape ``(2**n, n)``."""
    idx = np.arange(2**n, dtype=np.int64)
    gray = idx ^ (idx >> 1)
    bits = (gray[:, None] >> np.arange(n)) & 1
    return np.where(bits == 1, -1, 1).astype(np.int64)


def _perms_lex(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(
        -1, n
    )


_LAW_KINDS = ("independent_uniform", "constrained_signs", "dependent_joint")


@dataclass(frozen=True)
class SignPermutationLaw:
    """Joint law of signs ``eps`` and permutation ``sigma``.

    ``independent_uniform``
        ``eps`` uniform on ``{-1, 1}**n`` independent of a uniform ``sigma``.
    ``constrained_signs``
        ``eps`` uniform on sign vectors whose sum is ``2 - n`` or ``n - 2``,
        ``sigma`` uniform and independent.
    ``dependent_joint``
        explicit table ``{(eps, sigma): probability}``; missing keys have
        probability zero.
    """

    n: int
    kind: str = "independent_uniform"
    joint_weights: Mapping | None = field(default=None, compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError("n must be an integer")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind not in _LAW_KINDS:
            raise ValueError(f"unknown law kind {self.kind!r}; expected one of {_LAW_KINDS}")
        if self.kind == "dependent_joint":
            if not self.joint_weights:
                raise ValueError("dependent_joint law needs joint_weights")
            table = {}
            for (eps, sigma), w in self.joint_weights.items():
                eps = tuple(int(e) for e in eps)
                sigma = tuple(int(s) for s in sigma)
                if len(eps) != self.n or any(e not in (-1, 1) for e in eps):
                    raise ValueError(f"bad sign vector {eps}")
                if sorted(sigma) != list(range(self.n)):
                    raise ValueError(f"bad permutation {sigma}")
                w = _as_fraction(w)
                if w < 0:
                    raise ValueError("probabilities must be nonnegative")
                table[(eps, sigma)] = table.get((eps, sigma), Fraction(0)) + w
            total = sum(table.values(), Fraction(0))
            if total != 1:
                raise ValueError(f"joint weights sum to {total}, not 1")
            object.__setattr__(self, "joint_weights", table)
        elif self.joint_weights is not None:
            raise ValueError(f"joint_weights only allowed for dependent_joint, not {self.kind}")

    def _sign_allowed(self, eps) -> bool:
        s = sum(eps)
        return s in (2 - self.n, self.n - 2)

    def weight_matrix(self, signs: np.ndarray, perms: np.ndarray):
        """Integer weights over the ``signs x perms`` grid and their total."""
        n_s, n_p = len(signs), len(perms)
        if self.kind == "independent_uniform":
            return np.ones((n_s, n_p), dtype=np.int64), n_s * n_p
        if self.kind == "constrained_signs":
            rows = np.array([self._sign_allowed(tuple(e)) for e in signs], dtype=np.int64)
            w = np.repeat(rows[:, None], n_p, axis=1)
            return w, int(rows.sum()) * n_p
        den = 1
        for q in self.joint_weights.values():
            den = math.lcm(den, q.denominator)
        if den >= _INT64_SAFE:
            raise OverflowError("joint table denominators too large for exact int64 counts")
        s_index = {tuple(int(v) for v in e): i for i, e in enumerate(signs)}
        p_index = {tuple(int(v) for v in p): j for j, p in enumerate(perms)}
        w = np.zeros((n_s, n_p), dtype=np.int64)
        for (eps, sigma), q in self.joint_weights.items():
            w[s_index[eps], p_index[sigma]] += int(q * den)
        return w, den

    def sign_marginal(self) -> dict[tuple[int, ...], Fraction]:
        """Exact law of ``eps`` alone."""
        signs = [tuple(int(v) for v in e) for e in _signs_gray(self.n)]
        if self.kind == "independent_uniform":
            return {e: Fraction(1, 2**self.n) for e in signs}
        if self.kind == "constrained_signs":
            allowed = [e for e in signs if self._sign_allowed(e)]
            return {e: (Fraction(1, len(allowed)) if e in allowed else Fraction(0)) for e in signs}
        out = {e: Fraction(0) for e in signs}
        for (eps, _), q in self.joint_weights.items():
            out[eps] += q
        return out

    def to_dict(self) -> dict:
        d = {"n": self.n, "kind": self.kind}
        if self.kind == "dependent_joint":
            d["joint_weights"] = [
                {"eps": list(e), "sigma": list(s), "p": fraction_to_json(q)}
                for (e, s), q in sorted(self.joint_weights.items())
            ]
        return d


def random_weight_vector(n: int, rng, *, distinct_sums: bool = True, max_value: int = 10**6) -> WeightVector:
    """Random positive integer magnitudes in ``1..max_value``.

    With ``distinct_sums`` the vector satisfies the distinct-subset-sum
    condition (rejection sampling); otherwise one entry is copied onto
    another so that the condition fails. Draws only ``Generator.random()``.
    """
    from .sampling import _as_generator

    if n < 1 or (not distinct_sums and n < 2):
        raise ValueError("need n >= 1 (n >= 2 for repeated entries)")
    gen = _as_generator(rng)
    for _ in range(10_000):
        ints = [int(u * max_value) + 1 for u in gen.random(n)]
        if not distinct_sums:
            i, j = (int(u * n) for u in gen.random(2))
            if i == j:
                j = (i + 1) % n
            ints[j] = ints[i]
            return WeightVector(tuple(ints))
        x = WeightVector(tuple(ints))
        if x.satisfies_H:
            return x
    raise RuntimeError("could not draw a vector with distinct subset sums; raise max_value")


@dataclass(frozen=True)
class ExactPersistenceResult:
    n: int
    strict_count: int
    weak_count: int
    total: int
    p_strict: Fraction
    p_weak: Fraction
    w_distribution: tuple[Fraction, ...]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "strict_count": str(self.strict_count),
            "weak_count": str(self.weak_count),
            "total": str(self.total),
            "p_strict": fraction_to_json(self.p_strict),
            "p_weak": fraction_to_json(self.p_weak),
            "w_distribution": [fraction_to_json(q) for q in self.w_distribution],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ExactPersistenceResult":
        return cls(
            n=int(d["n"]),
            strict_count=int(d["strict_count"]),
            weak_count=int(d["weak_count"]),
            total=int(d["total"]),
            p_strict=fraction_from_json(d["p_strict"]),
            p_weak=fraction_from_json(d["p_weak"]),
            w_distribution=tuple(fraction_from_json(q) for q in d["w_distribution"]),
        )


def enumerate_persistence(
    x: WeightVector,
    law: SignPermutationLaw | None = None,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> ExactPersistenceResult:
    """Exhaustive enumeration of all ``2**n * n!`` sign-permutation outcomes.

    Permutations are processed in lexicographic blocks; each block contributes
    exact integer partial counts, so the result does not depend on the block
    size.
    """
    if not isinstance(x, WeightVector):
        x = WeightVector(tuple(x))
    n = x.n
    if law is None:
        law = SignPermutationLaw(n)
    if law.n != n:
        raise ValueError(f"law is for n={law.n} but weight vector has length {n}")
    if n > cap:
        raise ValueError(f"n={n} exceeds enumeration cap {cap}")

    ints, _ = x.scaled_integers()
    if max(ints) * n >= _INT64_SAFE:
        raise OverflowError("magnitudes too large for exact int64 prefix sums")
    xi = np.array(ints, dtype=np.int64)
    signs = _signs_gray(n)
    perms = _perms_lex(n)
    weights, total = law.weight_matrix(signs, perms)

    block = max(1, (1 << 22) // (len(signs) * n))
    strict_count = 0
    weak_count = 0
    w_counts = [0] * (n + 1)
    for start in range(0, len(perms), block):
        pb = perms[start : start + block]
        wb = weights[:, start : start + block]
        steps = signs[:, None, :] * xi[pb][None, :, :]
        s = np.cumsum(steps, axis=2)
        strict_count += int(wb[(s > 0).all(axis=2)].sum())
        weak_count += int(wb[(s >= 0).all(axis=2)].sum())
        smax = s.max(axis=2)
        w_idx = np.where(smax > 0, s.argmax(axis=2) + 1, 0)
        for ell in range(n + 1):
            w_counts[ell] += int(wb[w_idx == ell].sum())

    return ExactPersistenceResult(
        n=n,
        strict_count=strict_count,
        weak_count=weak_count,
        total=total,
        p_strict=Fraction(strict_count, total),
        p_weak=Fraction(weak_count, total),
        w_distribution=tuple(Fraction(c, total) for c in w_counts),
    )


def w_distribution_check(x: WeightVector, *, cap: int = DEFAULT_ENUMERATION_CAP):
    """Check ``P(W = l) = g(l) g(n - l)`` for every ``l``.

    Returns ``(ok, residuals)`` with one exact residual per ``l``. Raises
    ``ValueError`` for vectors with coinciding subset sums.
    """
    if not isinstance(x, WeightVector):
        x = WeightVector(tuple(x))
    if not x.satisfies_H:
        raise ValueError("argmax law identity requires distinct subset sums")
    res = enumerate_persistence(x, cap=cap)
    n = x.n
    residuals = [res.w_distribution[l] - g_exact(l) * g_exact(n - l) for l in range(n + 1)]
    return all(r == 0 for r in residuals), residuals


def srw_persistence_profile(n_steps: int, strict: bool, *, cap: int = SRW_DP_CAP) -> list[Fraction]:
    """Persistence probabilities of the simple symmetric +-1 walk at every step.

    Entry ``k - 1`` is ``P(S_1, ..., S_k > 0)`` (``>= 0`` when not strict).
    Surviving paths are counted height by height with Python integers.
    """
    if isinstance(n_steps, bool) or not isinstance(n_steps, (int, np.integer)):
        raise TypeError("n_steps must be an integer")
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if n_steps > cap:
        raise ValueError(f"n_steps={n_steps} exceeds cap {cap}")
    floor = 1 if strict else 0
    # counts[h] = number of surviving paths at height h
    counts = np.zeros(n_steps + 2, dtype=object)
    counts[:] = 0
    counts[0] = 1
    out = []
    for k in range(1, n_steps + 1):
        new = np.zeros_like(counts)
        new[:] = 0
        new[1:] += counts[:-1]
        new[:-1] += counts[1:]
        new[:floor] = 0
        counts = new
        out.append(Fraction(int(counts.sum()), 2**k))
    return out


def srw_persistence_dp(n_steps: int, strict: bool, *, cap: int = SRW_DP_CAP) -> Fraction:
    """Exact persistence probability of the simple symmetric +-1 walk after ``n_steps``."""
    return srw_persistence_profile(n_steps, strict, cap=cap)[-1]


def srw_persistence_enumeration(n_steps: int, strict: bool) -> Fraction:
    """Same quantity as :func:`srw_persistence_dp` by listing all paths."""
    if n_steps < 1 or n_steps > 24:
        raise ValueError("enumeration supports 1 <= n_steps <= 24")
    codes = np.arange(2**n_steps, dtype=np.int64)
    steps = 2 * ((codes[:, None] >> np.arange(n_steps)) & 1) - 1
    s = np.cumsum(steps, axis=1)
    ok = (s > 0).all(axis=1) if strict else (s >= 0).all(axis=1)
    return Fraction(int(ok.sum()), 2**n_steps)


def _check_sorted_positive(x: WeightVector, strictly_decreasing: bool):
    mags = x.magnitudes
    if any(m <= 0 for m in mags):
        raise ValueError("magnitudes must be strictly positive")
    if strictly_decreasing:
        ok = all(a > b for a, b in zip(mags, mags[1:]))
    else:
        ok = all(a >= b for a, b in zip(mags, mags[1:]))
    if not ok:
        kind = "strictly decreasing" if strictly_decreasing else "sorted in decreasing order"
        raise ValueError(f"magnitudes must be {kind}")


def counterexample_a(x: WeightVector, *, cap: int = DEFAULT_ENUMERATION_CAP) -> ExactPersistenceResult:
    """Persistence when the signs are uniform on vectors with a single odd sign.

    The sign vector is uniform on ``{eps : sum(eps) in {2-n, n-2}}`` (one
    ``+1`` or one ``-1``) and the permutation is uniform and independent; the
    marginal law of each ``xi_i`` is still symmetric but the signs are not
    independent, and the persistence probability then depends on ``x``.
    """
    if not isinstance(x, WeightVector):
        x = WeightVector(tuple(x))
    _check_sorted_positive(x, strictly_decreasing=False)
    return enumerate_persistence(x, SignPermutationLaw(x.n, "constrained_signs"), cap=cap)


def counterexample_a_printed_value(x: WeightVector) -> Fraction:
    """Closed form ``1/(2 n**2)`` if ``x_1 > x_2 + ... + x_n`` else ``0``.

    Kept for reports only. It counts the single-``+1`` sign patterns and
    omits the single-``-1`` ones, so it disagrees with
    :func:`counterexample_a`.
    """
    if not isinstance(x, WeightVector):
        x = WeightVector(tuple(x))
    mags = x.magnitudes
    n = x.n
    return Fraction(1, 2 * n * n) if mags[0] > sum(mags[1:], Fraction(0)) else Fraction(0)


@dataclass(frozen=True)
class CounterexampleB:
    law: SignPermutationLaw
    x: WeightVector
    result: ExactPersistenceResult
    contrast: WeightVector
    contrast_result: ExactPersistenceResult
    printed_value_x: Fraction
    printed_value_contrast: Fraction

    @property
    def separates(self) -> bool:
        return self.result.p_strict != self.contrast_result.p_strict

    def to_dict(self) -> dict:
        return {
            "law": self.law.to_dict(),
            "x": [str(m) for m in self.x.magnitudes],
            "contrast": [str(m) for m in self.contrast.magnitudes],
            "result": self.result.to_dict(),
            "contrast_result": self.contrast_result.to_dict(),
            "printed_value_x": fraction_to_json(self.printed_value_x),
            "printed_value_contrast": fraction_to_json(self.printed_value_contrast),
            "separates": self.separates,
        }


def _big_first(x: WeightVector) -> bool:
    m = x.magnitudes
    return m[0] > m[1] + m[2]


def _strict_prefix(eps, sigma, mags) -> bool:
    s = Fraction(0)
    for e, j in zip(eps, sigma):
        s += e * mags[j]
        if s <= 0:
            return False
    return True


def counterexample_b_search(
    x: WeightVector, contrast: WeightVector | None = None
) -> CounterexampleB:
    """Find a law with uniform signs whose persistence depends on ``x``.

    The sign marginal is kept uniform on ``{-1, 1}**3`` and, for each sign
    pattern, the permutation is chosen (deterministically) to maximize the
    gap between the strict-persistence indicators of ``x`` and ``contrast``.
    The gap is linear in the conditional permutation laws, so searching the
    6 deterministic choices per sign pattern is exhaustive. The chosen law is
    then re-verified with :func:`enumerate_persistence`.

    ``contrast`` defaults to ``(4, 3, 2)`` when ``x_1 > x_2 + x_3`` and to
    ``(5, 2, 1)`` otherwise.
    """
    if not isinstance(x, WeightVector):
        x = WeightVector(tuple(x))
    if x.n != 3:
        raise ValueError("counterexample (b) is defined for n = 3")
    _check_sorted_positive(x, strictly_decreasing=True)
    if contrast is None:
        contrast = WeightVector((4, 3, 2)) if _big_first(x) else WeightVector((5, 2, 1))
    elif not isinstance(contrast, WeightVector):
        contrast = WeightVector(tuple(contrast))
    if contrast.n != 3:
        raise ValueError("contrast must have length 3")
    _check_sorted_positive(contrast, strictly_decreasing=True)

    signs = [tuple(int(v) for v in e) for e in _signs_gray(3)]
    perms = list(itertools.permutations(range(3)))
    best = None
    for direction in (1, -1):
        choice = {}
        gap = 0
        for eps in signs:
            scores = [
                direction
                * (
                    int(_strict_prefix(eps, s, x.magnitudes))
                    - int(_strict_prefix(eps, s, contrast.magnitudes))
                )
                for s in perms
            ]
            j = int(np.argmax(scores))
            choice[eps] = perms[j]
            gap += scores[j]
        if best is None or gap > best[0]:
            best = (gap, choice)
    gap, choice = best
    if gap == 0:
        raise RuntimeError(
            f"no sign-dependent permutation law separates {x} from {contrast}"
        )
    table = {(eps, sigma): Fraction(1, 8) for eps, sigma in choice.items()}
    law = SignPermutationLaw(3, "dependent_joint", table)
    res_x = enumerate_persistence(x, law)
    res_c = enumerate_persistence(contrast, law)
    if res_x.p_strict == res_c.p_strict:
        raise RuntimeError("search result failed oracle re-verification")

    def printed(v):
        return Fraction(1, 4) + (Fraction(1, 8) if _big_first(v) else 0)

    return CounterexampleB(
        law=law,
        x=x,
        result=res_x,
        contrast=contrast,
        contrast_result=res_c,
        printed_value_x=printed(x),
        printed_value_contrast=printed(contrast),
    )


def srw_functional_enumeration(n_steps: int, f=None) -> dict:
    """Exhaustive oracle for the ``f``-integrated simple random walk.

    Lists all ``2**n_steps`` paths of ``X`` and returns the exact
    probabilities of strict / weak persistence of ``zeta_k = sum f(X_i)``,
    their bridge versions (jointly with ``X_n = 0``), and the local-time
    functionals ``E[g(L_n)]``, ``E[g(L_n - 1)]`` and their bridge versions,
    with ``g(m) = 0`` for ``m < 0``.

    Values are :class:`Fraction` when ``f`` is integer valued (identity,
    sign); for other ``f`` the persistence indicators are computed in
    float64.
    """
    from .chains import OddFunctional

    if f is None:
        f = OddFunctional("identity")
    elif isinstance(f, str):
        f = OddFunctional(f)
    if not 1 <= n_steps <= 22:
        raise ValueError("enumeration supports 1 <= n_steps <= 22")
    codes = np.arange(2**n_steps, dtype=np.int64)
    steps = 2 * ((codes[:, None] >> np.arange(n_steps)) & 1) - 1
    xs = np.cumsum(steps, axis=1)
    if f.kind in ("identity", "sign"):
        fx = xs if f.kind == "identity" else np.sign(xs)
    else:
        fx = f(xs)
    zeta = np.cumsum(fx, axis=1)
    strict = (zeta > 0).all(axis=1)
    weak = (zeta >= 0).all(axis=1)
    at_zero = xs[:, -1] == 0
    loc = (xs == 0).sum(axis=1)

    total = 2**n_steps
    g_vals = {m: g_exact(m) for m in range(0, n_steps + 1)}

    def g_sum(mask, shift):
        acc = Fraction(0)
        ls, cnt = np.unique(loc[mask] - shift, return_counts=True)
        for m, c in zip(ls, cnt):
            if m >= 0:
                acc += int(c) * g_vals[int(m)]
        return acc / total

    return {
        "strict": Fraction(int(strict.sum()), total),
        "weak": Fraction(int(weak.sum()), total),
        "strict_bridge": Fraction(int((strict & at_zero).sum()), total),
        "weak_bridge": Fraction(int((weak & at_zero).sum()), total),
        "Eg_Ln": g_sum(np.ones(total, bool), 0),
        "Eg_Ln_minus1": g_sum(np.ones(total, bool), 1),
        "Eg_Ln_bridge": g_sum(at_zero, 0),
        "Eg_Ln_minus1_bridge": g_sum(at_zero, 1),
        "strict_indicator": strict,
    }


def srw_local_time_pmf(n_steps: int) -> dict:
    """Exact law of the local time at 0 of the simple random walk.

    For ``n = 2m``: ``P(L_n = r) = 2**(r - n) C(n - r, m)`` and
    ``P(L_n = r, X_n = 0) = P(tau_r = n) = r/(n - r) C(n - r, m) 2**(r - n)``
    for ``r >= 1``. Odd horizons reduce to ``n - 1``.

    Returns ``{"pmf": [...], "bridge_pmf": [...]}`` as Fractions indexed by r.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    n = n_steps - (n_steps % 2)
    m = n // 2
    pmf = [Fraction(math.comb(n - r, m), 2 ** (n - r)) for r in range(m + 1)]
    if n_steps % 2:
        bridge = [Fraction(0)] * (m + 1)
    else:
        bridge = [Fraction(0)] + [
            Fraction(r, n - r) * Fraction(math.comb(n - r, m), 2 ** (n - r))
            for r in range(1, m + 1)
        ]
    return {"pmf": pmf, "bridge_pmf": bridge}


def srw_local_time_expectations_float(n_steps: int) -> dict:
    """Float64 ``E[g(L_n)]``, ``E[g(L_n-1)]`` and bridge versions for large ``n``.

    Uses the same closed forms as :func:`srw_local_time_pmf`, in log space.
    """
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    n = n_steps - (n_steps % 2)
    m = n // 2
    r = np.arange(0, m + 1)
    logp = gammaln(n - r + 1) - gammaln(m + 1) - gammaln(m - r + 1) + (r - n) * np.log(2.0)
    p = np.exp(logp)
    g = g_float_table(m + 1)
    g_r = g[r]
    g_rm1 = np.concatenate([[0.0], g[r[1:] - 1]])
    out = {"Eg_Ln": float(np.sum(g_r * p)), "Eg_Ln_minus1": float(np.sum(g_rm1 * p))}
    if n_steps % 2:
        out["Eg_Ln_bridge"] = 0.0
        out["Eg_Ln_minus1_bridge"] = 0.0
        out["P_Xn_zero"] = 0.0
    else:
        pb = np.zeros_like(p)
        pb[1:] = r[1:] / (n - r[1:]) * p[1:]
        out["Eg_Ln_bridge"] = float(np.sum(g_r * pb))
        out["Eg_Ln_minus1_bridge"] = float(np.sum(g_rm1 * pb))
        out["P_Xn_zero"] = float(pb.sum())
    return out
