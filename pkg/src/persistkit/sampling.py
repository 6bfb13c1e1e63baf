"""Random streams and samplers.

Every random draw in the package comes from a :class:`RandomStream`, which
wraps numpy's counter-based ``Philox`` (4x64, 10 rounds) bit generator keyed
by ``SeedSequence(seed, spawn_key=(stream_id, ...))``. Distinct stream ids
give independent substreams, and a given ``(seed, stream_id)`` reproduces the
same sequence of ``Generator.random()`` doubles on every platform. Samplers
only consume ``random()`` (and ``permuted``) so their output does not depend
on numpy's version-specific distribution code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ._validation import check_alpha

__all__ = [
    "GENERATOR_ALGORITHM",
    "RandomStream",
    "SymmetricIncrementLaw",
    "sample_exchangeable_sign_invariant",
    "sample_one_sided_stable",
    "fractional_moment",
]

GENERATOR_ALGORITHM = "numpy Philox4x64-10 keyed by SeedSequence(seed, spawn_key)"

_U64 = 2**64


@dataclass(frozen=True)
class RandomStream:
    """Reproducible random substream identified by ``(seed, stream_id)``."""

    seed: int = 0
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise TypeError(f"{name} must be an integer")
            if not 0 <= v < _U64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream_id", int(self.stream_id))
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def spawn(self, index: int) -> "RandomStream":
        """Child stream, independent of the parent and of its siblings."""
        return RandomStream(self.seed, self.stream_id, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self.path)
        return np.random.Generator(np.random.Philox(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RandomStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RandomStream(0 if rng is None else int(rng)).generator()
    raise TypeError(f"cannot make a generator from {type(rng).__name__}")


_INCREMENT_KINDS = ("gaussian", "uniform", "rademacher", "symmetrized_exponential")


@dataclass(frozen=True)
class SymmetricIncrementLaw:
    """Law of an i.i.d. increment, symmetric about 0 by construction.

    ``scale`` is sigma for ``gaussian``, ``a`` for ``uniform(-a, a)``, the jump
    size for ``rademacher`` and the exponential mean for
    ``symmetrized_exponential`` (a Laplace law).
    """

    kind: str = "gaussian"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _INCREMENT_KINDS:
            raise ValueError(f"unknown increment law {self.kind!r}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError("scale must be positive and finite")

    @property
    def atom_at_zero(self) -> float:
        return 0.0

    @property
    def is_atomic(self) -> bool:
        return self.kind == "rademacher"

    def sample(self, rng, size) -> np.ndarray:
        gen = _as_generator(rng)
        size = tuple(np.atleast_1d(size))
        u = gen.random(size)
        if self.kind == "rademacher":
            return np.where(u < 0.5, self.scale, -self.scale)
        if self.kind == "uniform":
            return self.scale * (2.0 * u - 1.0)
        if self.kind == "symmetrized_exponential":
            v = gen.random(size)
            mag = -self.scale * np.log1p(-v)
            return np.where(u < 0.5, mag, -mag)
        # Box-Muller on two uniforms, keeps the stream independent of numpy's normal code
        v = gen.random(size)
        return self.scale * np.sqrt(-2.0 * np.log1p(-u)) * np.cos(2.0 * math.pi * v)


def sample_exchangeable_sign_invariant(x, rng, size: int | None = None) -> np.ndarray:
    """Draw ``(eps_1 x_sigma(1), ..., eps_n x_sigma(n))``.

    Signs are i.i.d. uniform, ``sigma`` is a uniform permutation obtained by
    Fisher-Yates shuffling (``Generator.permuted``), independent of the signs.
    Returns shape ``(n,)`` or ``(size, n)``.
    """
    mags = getattr(x, "magnitudes", x)
    vec = np.array([float(m) for m in mags], dtype=np.float64)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError("x must be a non-empty 1-d vector")
    if np.any(vec < 0):
        raise ValueError("magnitudes must be >= 0")
    gen = _as_generator(rng)
    m = 1 if size is None else int(size)
    signs = np.where(gen.random((m, vec.size)) < 0.5, 1.0, -1.0)
    shuffled = gen.permuted(np.broadcast_to(vec, (m, vec.size)), axis=1)
    out = signs * shuffled
    return out[0] if size is None else out


def sample_one_sided_stable(alpha: float, rng, size: int | None = None):
    """Positive alpha-stable variables with Laplace transform ``exp(-t**alpha)``.

    Kanter's representation: with ``U`` uniform on ``(0, pi)`` and ``E`` a
    standard exponential,
    ``Z = sin(a U) / sin(U)**(1/a) * (sin((1-a) U) / E)**((1-a)/a)``.
    """
    alpha = check_alpha(alpha, closed=(False, False))
    gen = _as_generator(rng)
    m = 1 if size is None else int(size)
    u = math.pi * gen.random(m)
    # keep U away from 0 where sin(U)**(1/a) underflows
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    e = -np.log1p(-gen.random(m))
    a = alpha
    log_z = (
        np.log(np.sin(a * u))
        - np.log(np.sin(u)) / a
        + (1.0 - a) / a * (np.log(np.sin((1.0 - a) * u)) - np.log(e))
    )
    z = np.exp(log_z)
    return float(z[0]) if size is None else z


def fractional_moment(alpha: float, p: float) -> float:
    """``E[Z**p]`` for the one-sided stable law, ``Gamma(1 - p/alpha) / Gamma(1 - p)``.

    Finite for every ``p < alpha`` (including negative ``p``).
    """
    alpha = check_alpha(alpha, closed=(False, False))
    p = float(p)
    if not p < alpha:
        raise ValueError(f"moment of order p={p} is infinite for alpha={alpha}")
    if p == 0.0:
        return 1.0
    return float(math.exp(gammaln(1.0 - p / alpha) - gammaln(1.0 - p)))
