"""Monte-Carlo persistence estimates for f-integrated birth-death chains.

Trials are split into fixed-size chunks; chunk ``i`` draws from
``stream.spawn(i)`` and chunks are merged in index order, so results depend
on ``(seed, stream_id, chunk_size)`` but not on the number of threads.
All targets requested together are computed on common paths.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _kernels
from ._validation import check_horizons, check_positive_int
from .chains import BirthDeathChain, _as_functional, simple_random_walk
from .combinatorics import g_float_table, g_lookup
from .sampling import RandomStream

__all__ = [
    "TARGETS",
    "MIN_TRIALS",
    "DEFAULT_CHUNK_SIZE",
    "ESTIMATE_COLUMNS",
    "PersistenceEstimate",
    "PathBatch",
    "SandwichCheck",
    "SandwichReport",
    "PersistenceEstimator",
    "simulate_batch",
    "estimate",
    "estimate_many",
    "sandwich_check",
    "estimates_to_csv",
    "estimates_to_json",
]

TARGETS = (
    "strict",
    "weak",
    "strict_bridge",
    "weak_bridge",
    "Eg_Ln",
    "Eg_Ln_minus1",
    "Eg_Ln_bridge",
    "Eg_Ln_minus1_bridge",
)
_BRIDGE = frozenset(t for t in TARGETS if t.endswith("bridge"))
_FUNCTIONAL = frozenset(t for t in TARGETS if t.startswith("Eg_"))
_STRICT_ONLY = frozenset({"strict", "strict_bridge"})

MIN_TRIALS = 1000
DEFAULT_CHUNK_SIZE = 1 << 15
ESTIMATE_COLUMNS = ("chain_id", "target", "n", "point", "half_width", "trials", "seed")

_X_UNSET = np.iinfo(np.int32).min


@dataclass(frozen=True)
class PersistenceEstimate:
    """Sample mean of a per-path statistic with a 3-sigma half-width."""

    target: str
    n: int
    trials: int
    point: float
    half_width_3sigma: float
    seed: int
    chain_id: str
    stream_id: int = 0

    @property
    def half_width(self) -> float:
        return self.half_width_3sigma

    @property
    def stderr(self) -> float:
        return self.half_width_3sigma / 3.0

    def interval(self) -> tuple[float, float]:
        return self.point - self.half_width_3sigma, self.point + self.half_width_3sigma

    def to_row(self) -> dict:
        return {
            "chain_id": self.chain_id,
            "target": self.target,
            "n": int(self.n),
            "point": float(self.point),
            "half_width": float(self.half_width_3sigma),
            "trials": int(self.trials),
            "seed": int(self.seed),
        }


def _check_target(target: str):
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")


def _check_bridge_parity(chain: BirthDeathChain, targets, horizons):
    if chain.is_periodic and any(t in _BRIDGE for t in targets):
        odd = [int(n) for n in horizons if int(n) % 2]
        if odd:
            raise ValueError(f"bridge targets need even n on a 2-periodic chain; got odd n={odd}")


def _exit_mode(targets) -> int:
    targets = set(targets)
    if targets & _FUNCTIONAL:
        return _kernels.EXIT_NONE
    if targets <= _STRICT_ONLY:
        return _kernels.EXIT_STRICT
    return _kernels.EXIT_WEAK


@dataclass
class PathBatch:
    """Per-path outcomes of a batch simulation.

    ``strict_fail[i]`` / ``weak_fail[i]`` are the first times ``zeta`` is
    ``<= 0`` / ``< 0`` (``n_max + 1`` if never); ``endpoint[i, j]`` and
    ``local_time[i, j]`` are ``X_n`` and ``L_n`` at ``grid[j]`` (unset after an
    early exit, which only happens once the relevant persistence has failed).
    """

    grid: np.ndarray
    strict_fail: np.ndarray
    weak_fail: np.ndarray
    endpoint: np.ndarray
    local_time: np.ndarray
    p0: float
    seed: int
    stream_id: int
    chain_id: str
    full_paths: bool
    _g: np.ndarray = field(default=None, repr=False)

    @property
    def trials(self) -> int:
        return int(self.strict_fail.shape[0])

    def _col(self, n: int) -> int:
        hit = np.flatnonzero(self.grid == int(n))
        if hit.size == 0:
            raise ValueError(f"horizon {n} was not simulated")
        return int(hit[0])

    def _g_table(self):
        if self._g is None:
            self._g = g_float_table(int(self.grid[-1]))
        return self._g

    def values(self, target: str, n: int) -> np.ndarray:
        """Per-path statistic whose mean estimates ``target`` at horizon ``n``."""
        _check_target(target)
        j = self._col(n)
        if target in _FUNCTIONAL and not self.full_paths:
            raise ValueError(f"{target} needs full paths; simulate without early exit")
        n = int(n)
        if target.startswith("strict"):
            v = self.strict_fail > n
        elif target.startswith("weak"):
            v = self.weak_fail > n
        else:
            shift = 1 if "minus1" in target else 0
            v = g_lookup(self._g_table(), self.local_time[:, j].astype(np.int64) - shift)
        if target in _BRIDGE:
            v = v * (self.endpoint[:, j] == 0)
        return np.asarray(v, dtype=np.float64)

    def estimate(self, target: str, n: int) -> PersistenceEstimate:
        v = self.values(target, n)
        m = v.size
        point = float(v.mean())
        hw = 3.0 * float(v.std(ddof=1)) / math.sqrt(m) if m > 1 else math.inf
        return PersistenceEstimate(target, int(n), m, point, hw, self.seed, self.chain_id, self.stream_id)


def _as_stream(rng) -> RandomStream:
    if isinstance(rng, RandomStream):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RandomStream(0 if rng is None else int(rng))
    raise TypeError("rng must be a RandomStream or an integer seed (generators cannot be split reproducibly)")


def _run_chunk(args):
    gen, m, n_max, up, down, simple, fk, fg, grid, mode = args
    sf = np.empty(m, dtype=np.int64)
    wf = np.empty(m, dtype=np.int64)
    x_at = np.full((m, grid.size), _X_UNSET, dtype=np.int32)
    l_at = np.full((m, grid.size), -1, dtype=np.int32)
    _kernels.simulate_batch(gen, m, n_max, up, down, simple, fk, fg, grid, mode, sf, wf, x_at, l_at)
    return sf, wf, x_at, l_at


def simulate_batch(
    chain: BirthDeathChain,
    f,
    horizons,
    trials: int,
    rng=0,
    *,
    targets=TARGETS,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> PathBatch:
    """Simulate ``trials`` paths up to ``max(horizons)`` and record all horizons.

    Paths stop early when every requested target is a persistence indicator
    and the relevant persistence has already failed.
    """
    f = _as_functional(f)
    grid = check_horizons(horizons)
    trials = check_positive_int(trials, "trials")
    threads = check_positive_int(threads, "threads")
    chunk_size = check_positive_int(chunk_size, "chunk_size")
    for t in targets:
        _check_target(t)
    _check_bridge_parity(chain, targets, grid)
    stream = _as_stream(rng)
    n_max = int(grid[-1])
    mode = _exit_mode(targets)
    up, down = chain.tables(1 if chain.simple else n_max + 1)
    jobs = []
    for i, start in enumerate(range(0, trials, chunk_size)):
        m = min(chunk_size, trials - start)
        gen = stream.spawn(i).generator()
        jobs.append((gen, m, n_max, up, down, bool(chain.simple), f.code, float(f.gamma), grid, mode))
    if threads == 1 or len(jobs) == 1:
        parts = [_run_chunk(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    sf, wf, x_at, l_at = (np.concatenate([p[k] for p in parts]) for k in range(4))
    return PathBatch(
        grid=grid,
        strict_fail=sf,
        weak_fail=wf,
        endpoint=x_at,
        local_time=l_at,
        p0=float(chain.p0),
        seed=stream.seed,
        stream_id=stream.stream_id,
        chain_id=chain.name,
        full_paths=mode == _kernels.EXIT_NONE,
    )


def _check_trials(trials):
    trials = check_positive_int(trials, "trials")
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    return trials


def estimate_many(chain, f, horizons, targets, trials, rng=0, *, threads=1, chunk_size=DEFAULT_CHUNK_SIZE):
    """All ``targets`` at all ``horizons``, on common paths; ordered by ``(n, target)``."""
    targets = tuple(targets)
    if not targets:
        raise ValueError("at least one target is required")
    trials = _check_trials(trials)
    batch = simulate_batch(chain, f, horizons, trials, rng, targets=targets, threads=threads, chunk_size=chunk_size)
    return [batch.estimate(t, int(n)) for n in batch.grid for t in targets]


def estimate(chain, f, n, target, trials, rng=0, *, threads=1, chunk_size=DEFAULT_CHUNK_SIZE) -> PersistenceEstimate:
    """Monte-Carlo estimate of one target at horizon ``n``.

    Bridge targets are joint probabilities with ``{X_n = 0}``. ``Eg_*``
    targets average ``g(L_n)`` or ``g(L_n - 1)`` with ``g(m) = 0`` for
    ``m < 0``.
    """
    _check_target(target)
    n = check_positive_int(n, "n")
    return estimate_many(chain, f, [n], [target], trials, rng, threads=threads, chunk_size=chunk_size)[0]


@dataclass(frozen=True)
class SandwichCheck:
    """``lower <= middle <= upper``, each side allowed a combined 3-sigma slack."""

    name: str
    lower: PersistenceEstimate | None
    middle: PersistenceEstimate
    upper: PersistenceEstimate | None
    lower_factor: float = 1.0

    @property
    def lower_value(self) -> float:
        return -math.inf if self.lower is None else self.lower_factor * self.lower.point

    @property
    def upper_value(self) -> float:
        return math.inf if self.upper is None else self.upper.point

    @property
    def lower_tol(self) -> float:
        if self.lower is None:
            return 0.0
        return math.hypot(self.lower_factor * self.lower.half_width, self.middle.half_width)

    @property
    def upper_tol(self) -> float:
        if self.upper is None:
            return 0.0
        return math.hypot(self.upper.half_width, self.middle.half_width)

    @property
    def passed(self) -> bool:
        m = self.middle.point
        return (m >= self.lower_value - self.lower_tol) and (m <= self.upper_value + self.upper_tol)

    def describe(self) -> str:
        return (
            f"{self.name}: {self.lower_value:.6g} <= {self.middle.point:.6g} <= {self.upper_value:.6g} "
            f"(tol -{self.lower_tol:.2g}/+{self.upper_tol:.2g}) {'ok' if self.passed else 'VIOLATED'}"
        )


@dataclass
class SandwichReport:
    chain_id: str
    n: int
    trials: int
    seed: int
    p0: float
    checks: list[SandwichCheck]
    estimates: dict[str, PersistenceEstimate]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[SandwichCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "chain_id": self.chain_id,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "p0": self.p0,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "lower": c.lower_value,
                    "middle": c.middle.point,
                    "upper": c.upper_value,
                    "lower_tol": c.lower_tol,
                    "upper_tol": c.upper_tol,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
            "estimates": {k: v.to_row() for k, v in self.estimates.items()},
        }


def sandwich_check(
    chain, f, n, trials, rng=0, *, threads=1, chunk_size=DEFAULT_CHUNK_SIZE, batch: PathBatch | None = None
) -> SandwichReport:
    """Check the local-time sandwich bounds on common paths.

    Persistence: ``p0 (1 - p0) E[g(L_n - 1)] <= P(strict) <= E[g(L_n)]``;
    bridge: ``p0 E[g(L_n - 1); X_n = 0] <= P(strict, X_n = 0) <= E[g(L_n); X_n = 0]``;
    weak: ``P(weak) >= (1 - p0) E[g(L_n)]`` and the same on ``{X_n = 0}``.
    Bridge checks are skipped at odd ``n`` on 2-periodic chains. A prebuilt
    full-path ``batch`` containing ``n`` may be passed to reuse paths.
    """
    n = check_positive_int(n, "n")
    bridge_ok = not (chain.is_periodic and n % 2)
    if batch is None:
        trials = _check_trials(trials)
        targets = TARGETS if bridge_ok else tuple(t for t in TARGETS if t not in _BRIDGE)
        batch = simulate_batch(chain, f, [n], trials, rng, targets=targets, threads=threads, chunk_size=chunk_size)
    elif not batch.full_paths:
        raise ValueError("sandwich_check needs a full-path batch")
    p0 = float(chain.p0)
    names = TARGETS if bridge_ok else [t for t in TARGETS if t not in _BRIDGE]
    est = {t: batch.estimate(t, n) for t in names}
    checks = [
        SandwichCheck("persistence", est["Eg_Ln_minus1"], est["strict"], est["Eg_Ln"], p0 * (1 - p0)),
        SandwichCheck("weak_persistence", est["Eg_Ln"], est["weak"], None, 1 - p0),
        SandwichCheck("strict_le_weak", None, est["strict"], est["weak"]),
    ]
    if bridge_ok:
        checks += [
            SandwichCheck("bridge", est["Eg_Ln_minus1_bridge"], est["strict_bridge"], est["Eg_Ln_bridge"], p0),
            SandwichCheck("weak_bridge", est["Eg_Ln_bridge"], est["weak_bridge"], None, 1 - p0),
        ]
    return SandwichReport(chain.name, n, batch.trials, batch.seed, p0, checks, est)


class PersistenceEstimator(BaseEstimator):
    """Estimate persistence targets of an integrated chain over a grid of horizons.

    Parameters
    ----------
    chain : BirthDeathChain, optional
        Defaults to the simple random walk.
    f : str or OddFunctional, default="identity"
    targets : tuple of str, default=("strict",)
    trials : int, default=10000
    seed : int, default=0
    stream_id : int, default=0
    threads : int, default=1
    chunk_size : int, default=32768

    Attributes
    ----------
    estimates_ : list of PersistenceEstimate
        Ordered by horizon, then target.
    horizons_ : ndarray of int64
    """

    def __init__(
        self,
        chain=None,
        f="identity",
        targets=("strict",),
        trials=10_000,
        seed=0,
        stream_id=0,
        threads=1,
        chunk_size=DEFAULT_CHUNK_SIZE,
    ):
        self.chain = chain
        self.f = f
        self.targets = targets
        self.trials = trials
        self.seed = seed
        self.stream_id = stream_id
        self.threads = threads
        self.chunk_size = chunk_size

    def fit(self, X, y=None):
        """Simulate at the horizons ``X`` (1-d array or single column)."""
        h = np.asarray(X)
        if h.ndim == 2:
            if h.shape[1] != 1:
                raise ValueError("X must hold one column of horizons")
            h = h[:, 0]
        self.horizons_ = check_horizons(h)
        chain = self.chain if self.chain is not None else simple_random_walk()
        stream = RandomStream(self.seed, self.stream_id)
        self.estimates_ = estimate_many(
            chain, self.f, self.horizons_, self.targets, self.trials, stream,
            threads=self.threads, chunk_size=self.chunk_size,
        )
        self.chain_id_ = chain.name
        return self

    def curve(self, target: str):
        """``(n, point, half_width)`` triples for one target."""
        check_is_fitted(self, "estimates_")
        _check_target(target)
        rows = [(e.n, e.point, e.half_width) for e in self.estimates_ if e.target == target]
        if not rows:
            raise ValueError(f"target {target!r} was not estimated")
        return rows

    def fit_exponent(self, target: str):
        """Power-law fit of one target's curve (see :func:`persistkit.asymptotics.fit_power_law`)."""
        from .asymptotics import fit_power_law

        return fit_power_law(self.curve(target))

    def rows(self) -> list[dict]:
        check_is_fitted(self, "estimates_")
        return [e.to_row() for e in self.estimates_]


def _rows(estimates):
    return [e.to_row() if isinstance(e, PersistenceEstimate) else dict(e) for e in estimates]


def estimates_to_csv(estimates, fh=None) -> str:
    """Write estimate rows with the fixed columns; returns the text."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=ESTIMATE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in _rows(estimates):
        row = dict(row)
        row["point"] = repr(float(row["point"]))
        row["half_width"] = repr(float(row["half_width"]))
        w.writerow({k: row[k] for k in ESTIMATE_COLUMNS})
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def estimates_to_json(estimates, fh=None) -> str:
    text = json.dumps([{k: r[k] for k in ESTIMATE_COLUMNS} for r in _rows(estimates)], indent=2) + "\n"
    if fh is not None:
        fh.write(text)
    return text
