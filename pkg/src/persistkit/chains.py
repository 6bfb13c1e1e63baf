"""Symmetric birth-death chains on the integers and their f-integrated walks.

A chain is described by its outward / inward probabilities on ``|x|``:
``p[x] = P(x -> x+1)`` and ``q[x] = P(x -> x-1)`` for ``x >= 1`` (mirrored for
``x < 0``), and ``p0 = P(0 -> 1) = P(0 -> -1)``. Chains never jump over 0, so
the additive functional ``zeta_n = f(X_1) + ... + f(X_n)`` is monotone on
every excursion away from 0.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .sampling import _as_generator

__all__ = [
    "ClampWarning",
    "BirthDeathChain",
    "BesselLikeSpec",
    "OddFunctional",
    "PathSummary",
    "RecurrenceReport",
    "Tau1Tail",
    "CHAIN_SCHEMA",
    "simple_random_walk",
    "make_bessel_like",
    "chain_from_config",
    "load_chain",
    "simulate_path",
    "classify_recurrence",
    "tau1_tail",
]

_TOL = 1e-12


class ClampWarning(UserWarning):
    """Raised when Bessel-like probabilities are clipped to ``[eta, 1 - eta]``."""


@dataclass(frozen=True, eq=False)
class BirthDeathChain:
    """Symmetric birth-death chain with a dense kernel table.

    Parameters
    ----------
    p0 : float
        ``P(0 -> 1)``, in ``(0, 1/2]``.
    p, q : array-like
        ``p[x-1], q[x-1]`` are the outward / inward probabilities at height
        ``x = 1 .. len(p)``.
    eta : float, optional
        Uniform ellipticity level of the embedded jump chain; checked when set.
    row_fn : callable, optional
        ``row_fn(xs) -> (p, q)`` for heights beyond the table. When absent the
        last table row is repeated.
    """

    p0: float
    p: np.ndarray
    q: np.ndarray
    eta: float | None = None
    name: str = "chain"
    row_fn: Callable | None = field(default=None, repr=False)
    simple: bool = False
    n_clamped: int = 0
    bessel: "BesselLikeSpec | None" = field(default=None, repr=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64).reshape(-1)
        q = np.array(self.q, dtype=np.float64).reshape(-1)
        if p.size == 0 or p.shape != q.shape:
            raise ValueError("p and q must be non-empty and of equal length")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if not 0.0 < self.p0 <= 0.5:
            raise ValueError(f"p0 must lie in (0, 1/2], got {self.p0}")
        self._check_rows(p, q)
        if self.eta is not None and not 0.0 < self.eta < 0.5:
            raise ValueError("eta must lie in (0, 1/2)")

    def _check_rows(self, p, q):
        if np.any(p < 0) or np.any(q < 0) or np.any(p + q > 1.0 + _TOL):
            raise ValueError("kernel rows must satisfy p, q >= 0 and p + q <= 1")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise ValueError("kernel entries must be finite")
        if np.any(q == 0):
            raise ValueError("q_x = 0 would make the chain unable to return to 0")
        if self.eta is not None:
            jump = p / (p + q)
            if np.any(jump < self.eta - _TOL) or np.any(jump > 1 - self.eta + _TOL):
                raise ValueError("embedded jump chain violates uniform ellipticity")

    @property
    def x_cap(self) -> int:
        return int(self.p.size)

    @property
    def r0(self) -> float:
        return 1.0 - 2.0 * self.p0

    @property
    def is_periodic(self) -> bool:
        """True when no state can hold (period 2)."""
        if self.simple:
            return True
        if self.r0 > 0:
            return False
        if np.any(self.p + self.q < 1.0 - _TOL):
            return False
        if self.bessel is not None:
            return self.bessel.laziness == 0.0
        return self.row_fn is None

    def tables(self, x_max: int) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``up, down`` of length ``x_max + 1`` indexed by height.

        Index 0 holds ``p0`` in both arrays.
        """
        x_max = int(x_max)
        up = np.empty(x_max + 1)
        down = np.empty(x_max + 1)
        up[0] = down[0] = self.p0
        k = min(x_max, self.x_cap)
        up[1 : k + 1] = self.p[:k]
        down[1 : k + 1] = self.q[:k]
        if x_max > self.x_cap:
            xs = np.arange(self.x_cap + 1, x_max + 1)
            if self.row_fn is None:
                up[self.x_cap + 1 :] = self.p[-1]
                down[self.x_cap + 1 :] = self.q[-1]
            else:
                pe, qe = self.row_fn(xs)
                pe = np.asarray(pe, dtype=np.float64)
                qe = np.asarray(qe, dtype=np.float64)
                self._check_rows(pe, qe)
                up[self.x_cap + 1 :] = pe
                down[self.x_cap + 1 :] = qe
        return up, down

    def stationary_mean_return_time(self, x_max: int = 10**6) -> float:
        """``E[tau_1] = 1 / pi(0)`` from detailed balance.

        ``pi(x) / pi(0) = p0 * p_1 ... p_{x-1} / (q_1 ... q_x)`` is summed up to
        ``x_max``; the remainder is estimated from the local power-law decay
        of the last terms. Returns ``inf`` when that decay is not summable.
        """
        up, down = self.tables(x_max)
        log_ratio = np.cumsum(np.log(up[:-1]) - np.log(down[1:]))
        terms = np.exp(log_ratio)
        total = float(terms.sum())
        last = float(terms[-1])
        if last <= 1e-16 * max(total, 1.0):
            return 1.0 + 2.0 * total
        half = x_max // 2
        decay = (log_ratio[half - 1] - log_ratio[-1]) / math.log(x_max / half)
        if decay <= 1.05:
            return math.inf
        total += last * x_max / (decay - 1.0)
        return 1.0 + 2.0 * total


def simple_random_walk(x_cap: int = 1) -> BirthDeathChain:
    """The simple symmetric +-1 random walk."""
    half = np.full(x_cap, 0.5)
    return BirthDeathChain(p0=0.5, p=half, q=half.copy(), eta=None, name="srw", simple=True)


@dataclass(frozen=True)
class BesselLikeSpec:
    """Parameters of ``p_x = (1 - (delta + eps_x) / (2x)) / 2``.

    ``epsilon_fn`` maps an integer array of heights to ``eps_x`` (default 0);
    ``laziness`` mixes in a holding probability ``r`` at every state.
    """

    delta: float = 0.0
    epsilon_fn: Callable | None = None
    laziness: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")
        if not 0.0 <= self.laziness < 1.0:
            raise ValueError("laziness must lie in [0, 1)")

    @property
    def alpha(self) -> float:
        """Return-time tail index ``(1 + delta) / 2``."""
        return (1.0 + self.delta) / 2.0

    def epsilon(self, xs) -> np.ndarray:
        xs = np.asarray(xs)
        if self.epsilon_fn is None:
            return np.zeros(xs.shape)
        eps = np.asarray(self.epsilon_fn(xs), dtype=np.float64)
        if eps.shape != xs.shape:
            eps = np.broadcast_to(eps, xs.shape).astype(np.float64)
        if not np.all(np.isfinite(eps)):
            raise ValueError("epsilon_fn returned non-finite values")
        return eps

    def raw_p(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        return 0.5 * (1.0 - (self.delta + self.epsilon(xs)) / (2.0 * xs))

    def slowly_varying_L(self, x: int) -> float:
        """``L(x) = exp(sum_{k<=x} eps_k / k)``."""
        ks = np.arange(1, int(x) + 1)
        return float(np.exp(np.sum(self.epsilon(ks) / ks)))


def make_bessel_like(
    spec: BesselLikeSpec, eta: float = 0.05, x_cap: int = 4096, name: str | None = None
) -> BirthDeathChain:
    """Build the Bessel-like chain, clamped to ``[eta, 1 - eta]`` then lazified.

    ``p0 = (1 - r) / 2``. Clamped rows are counted in ``n_clamped`` and
    reported with a :class:`ClampWarning`.
    """
    if not 0.0 < eta < 0.5:
        raise ValueError("eta must lie in (0, 1/2)")
    r = spec.laziness

    def rows(xs):
        raw = spec.raw_p(xs)
        pc = np.clip(raw, eta, 1.0 - eta)
        return (1.0 - r) * pc, (1.0 - r) * (1.0 - pc)

    xs = np.arange(1, x_cap + 1)
    raw = spec.raw_p(xs)
    n_clamped = int(np.sum((raw < eta) | (raw > 1.0 - eta)))
    if n_clamped:
        warnings.warn(
            f"{n_clamped} Bessel-like transition probabilities clamped to [{eta}, {1 - eta}]",
            ClampWarning,
            stacklevel=2,
        )
    p, q = rows(xs)
    simple = spec.delta == 0.0 and spec.epsilon_fn is None and r == 0.0
    if name is None:
        name = f"bessel(delta={spec.delta:g},lazy={r:g})"
    return BirthDeathChain(
        p0=(1.0 - r) / 2.0,
        p=p,
        q=q,
        eta=eta,
        name=name,
        row_fn=rows,
        simple=simple,
        n_clamped=n_clamped,
        bessel=spec,
    )


_FUNCTIONAL_KINDS = {"identity": _kernels.F_IDENTITY, "sign": _kernels.F_SIGN, "power": _kernels.F_POWER}


@dataclass(frozen=True)
class OddFunctional:
    """Odd, sign-preserving ``f``: identity, sign, or ``|x|**gamma * sign(x)``."""

    kind: str = "identity"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in _FUNCTIONAL_KINDS:
            raise ValueError(f"unknown functional {self.kind!r}")
        if self.kind == "power" and not (math.isfinite(self.gamma) and self.gamma > -1):
            raise ValueError("power functional needs gamma > -1")

    @property
    def code(self) -> int:
        return _FUNCTIONAL_KINDS[self.kind]

    @property
    def name(self) -> str:
        return f"power({self.gamma:g})" if self.kind == "power" else self.kind

    def __call__(self, x):
        x = np.asarray(x)
        if self.kind == "identity":
            return x.astype(np.float64)
        if self.kind == "sign":
            return np.sign(x).astype(np.float64)
        return np.sign(x) * np.abs(x).astype(np.float64) ** self.gamma

    def scalar(self, x: int) -> float:
        return _kernels._f_eval(int(x), self.code, float(self.gamma))


def _as_functional(f) -> OddFunctional:
    if f is None:
        return OddFunctional()
    if isinstance(f, OddFunctional):
        return f
    if isinstance(f, str):
        if f.startswith("power"):
            g = float(f[f.index("(") + 1 : f.index(")")]) if "(" in f else 0.5
            return OddFunctional("power", g)
        return OddFunctional(f)
    raise TypeError(f"cannot interpret {f!r} as an odd functional")


@dataclass
class PathSummary:
    n: int
    local_time: int
    endpoint: int
    strict_persisted: bool
    weak_persisted: bool
    first_failure: int | None
    steps_run: int
    zeta: float
    return_times: list[int] | None = None
    trajectory: np.ndarray | None = field(default=None, repr=False)


_MODES = ("strict", "weak", "bridge_full")


def simulate_path(chain: BirthDeathChain, f, n: int, mode: str = "bridge_full", rng=None, record: bool = False) -> PathSummary:
    """Simulate ``X_0 = 0, ..., X_n`` and track ``zeta``, ``L_n`` and returns.

    ``strict`` / ``weak`` modes stop at the first strict / weak persistence
    failure (``local_time`` and ``endpoint`` are then those at the stopping
    step); ``bridge_full`` always runs to ``n``. Uses the same random
    consumption as the compiled batch kernel.
    """
    f = _as_functional(f)
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = _as_generator(rng)
    up, down = chain.tables(n + 1)
    x = 0
    zeta = 0.0
    loc = 0
    sf = None
    wf = None
    returns = []
    traj = [0] if record else None
    bits = 0
    nbits = 0
    k_run = 0
    for k in range(1, n + 1):
        if chain.simple:
            if nbits == 0:
                bits = int(gen.random() * _kernels.TWO53)
                nbits = 53
            x += 1 if bits & 1 else -1
            bits >>= 1
            nbits -= 1
        else:
            u = gen.random()
            if x == 0:
                if u < up[0]:
                    x = 1
                elif u < 2.0 * up[0]:
                    x = -1
            else:
                ax = abs(x)
                if u < up[ax]:
                    ax += 1
                elif u < up[ax] + down[ax]:
                    ax -= 1
                x = ax if x > 0 else -ax
        k_run = k
        if record:
            traj.append(x)
        if x == 0:
            loc += 1
            returns.append(k)
        zeta += f.scalar(x)
        if sf is None and zeta <= 0.0:
            sf = k
        if wf is None and zeta < 0.0:
            wf = k
        if mode == "strict" and sf is not None:
            break
        if mode == "weak" and wf is not None:
            break
    return PathSummary(
        n=n,
        local_time=loc,
        endpoint=x,
        strict_persisted=sf is None,
        weak_persisted=wf is None,
        first_failure=sf,
        steps_run=k_run,
        zeta=zeta,
        return_times=returns,
        trajectory=np.array(traj) if record else None,
    )


@dataclass
class RecurrenceReport:
    classification: str
    diagnostics: dict


def classify_recurrence(chain: BirthDeathChain, x_max: int = 100_000, margin: float = 0.1) -> RecurrenceReport:
    """Classify a chain as transient, null or positive recurrent.

    ``lambda_x = prod_{k<=x} q_k / p_k`` behaves like ``x**delta`` up to a
    slowly varying factor: ``sum lambda_x`` diverges (recurrence) when the
    exponent exceeds -1 and ``sum 1/lambda_x`` converges (positive recurrence)
    when it exceeds 1. The exponent is estimated by regressing ``log lambda``
    on ``log x`` over ``[x_max/8, x_max]``; within ``margin`` of -1 or 1 the
    answer is ``inconclusive``. Bessel-like chains are classified by their
    ``delta`` with the same margin and the numeric trend is reported
    alongside.
    """
    if x_max < 16:
        raise ValueError("x_max must be >= 16")
    up, down = chain.tables(x_max)
    xs = np.arange(1, x_max + 1)
    log_lam = np.cumsum(np.log(down[1:]) - np.log(up[1:]))
    sel = xs >= x_max // 8
    slope, _ = np.polyfit(np.log(xs[sel]), log_lam[sel], 1)

    def rule(d):
        if abs(d + 1) < margin or abs(d - 1) < margin:
            return "inconclusive"
        if d < -1:
            return "transient"
        if d < 1:
            return "null_recurrent"
        return "positive_recurrent"

    diag = {
        "x_max": int(x_max),
        "lambda_exponent": float(slope),
        "log_lambda_at_x_max": float(log_lam[-1]),
        "sum_lambda_partial": float(np.sum(np.exp(np.minimum(log_lam, 700.0)))),
        "sum_inv_lambda_partial": float(np.sum(np.exp(np.minimum(-log_lam, 700.0)))),
        "numeric_rule": rule(slope),
    }
    if chain.bessel is not None:
        d = chain.bessel.delta
        diag["delta"] = d
        diag["delta_rule"] = rule(d)
        big_l = chain.bessel.slowly_varying_L(x_max)
        diag["K0_fit"] = float(math.exp(log_lam[-1] - d * math.log(x_max)) * big_l)
        return RecurrenceReport(diag["delta_rule"], diag)
    return RecurrenceReport(diag["numeric_rule"], diag)


@dataclass
class Tau1Tail:
    """Return-time law from the forward DP.

    ``pmf[k] = P(tau_1 = k)``, ``tail[k] = P(tau_1 > k)``,
    ``mu[k] = E[tau_1 1{tau_1 <= k}]`` for ``k = 0..n_max``.
    """

    n_max: int
    pmf: np.ndarray
    tail: np.ndarray
    mu: np.ndarray
    lost_mass: float
    window: int
    alpha_fit: float | None = None
    alpha_stderr: float | None = None

    @property
    def reliable(self) -> bool:
        return self.lost_mass <= 1e-12 * max(self.tail[-1], 1e-300)

    @property
    def mean_truncated(self) -> float:
        """``sum_{k < n_max} P(tau_1 > k)``; equals ``E[tau_1]`` up to the tail."""
        return float(self.tail[:-1].sum())


def tau1_tail(chain: BirthDeathChain, n_max: int, window: int | None = None, fit_from: int | None = None) -> Tau1Tail:
    """Exact (float64) law of ``tau_1 = inf{n >= 1 : X_n = 0}`` up to ``n_max``.

    The height window defaults to ``min(n_max, 12 sqrt(n_max) + 100)``; mass
    that leaves it is tracked in ``lost_mass``. The tail index is fitted on a
    log grid over ``[fit_from, n_max]`` (default ``n_max / 100``), using even
    times only for periodic chains.
    """
    if n_max < 1 or n_max > 10**6:
        raise ValueError("n_max must lie in [1, 10**6]")
    if window is None:
        window = int(min(n_max, 12 * math.sqrt(n_max) + 100))
    window = max(1, int(window))
    up, down = chain.tables(window + 1)
    pmf, tail, lost = _kernels.tau1_forward(int(n_max), up, down, window)
    mu = np.cumsum(np.arange(n_max + 1) * pmf)
    out = Tau1Tail(n_max=int(n_max), pmf=pmf, tail=tail, mu=mu, lost_mass=float(lost), window=window)
    lo = fit_from if fit_from is not None else max(2, n_max // 100)
    if n_max >= 4 * lo and n_max >= 16:
        from .asymptotics import fit_power_law

        grid = np.unique(np.geomspace(lo, n_max, 24).astype(np.int64))
        if chain.is_periodic:
            grid = np.unique(grid - grid % 2)
        grid = grid[(grid >= 1) & (tail[grid] > 0)]
        if grid.size >= 4:
            fit = fit_power_law(list(zip(grid.tolist(), tail[grid].tolist(), [0.0] * grid.size)))
            out.alpha_fit = -fit.exponent
            out.alpha_stderr = fit.stderr
    return out


CHAIN_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["srw", "bessel", "table"]},
        "name": {"type": "string"},
        "delta": {"type": "number"},
        "laziness": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "eta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
        "x_cap": {"type": "integer", "minimum": 1},
        "epsilon": {
            "type": "object",
            "properties": {
                "formula": {"enum": ["zero", "power"]},
                "scale": {"type": "number"},
                "exponent": {"type": "number", "exclusiveMinimum": 0},
                "table": {"type": "array", "items": {"type": "number"}},
            },
            "additionalProperties": False,
        },
        "p0": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
        "p": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
        "q": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
    },
    "additionalProperties": False,
}


def _epsilon_from_config(cfg: dict | None):
    if not cfg or cfg.get("formula", "zero") == "zero" and "table" not in cfg:
        return None
    if "table" in cfg:
        tab = np.asarray(cfg["table"], dtype=np.float64)

        def eps(xs):
            xs = np.asarray(xs, dtype=np.int64)
            out = np.zeros(xs.shape)
            ok = xs <= tab.size
            out[ok] = tab[xs[ok] - 1]
            return out

        return eps
    scale = float(cfg.get("scale", 1.0))
    expo = float(cfg.get("exponent", 1.0))
    return lambda xs: scale * np.asarray(xs, dtype=np.float64) ** (-expo)


def chain_from_config(cfg: dict) -> BirthDeathChain:
    """Build a chain from a config mapping validated against :data:`CHAIN_SCHEMA`."""
    import jsonschema

    jsonschema.validate(cfg, CHAIN_SCHEMA)
    kind = cfg["kind"]
    if kind == "srw":
        return simple_random_walk()
    if kind == "bessel":
        spec = BesselLikeSpec(
            delta=float(cfg.get("delta", 0.0)),
            epsilon_fn=_epsilon_from_config(cfg.get("epsilon")),
            laziness=float(cfg.get("laziness", 0.0)),
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ClampWarning)
            return make_bessel_like(spec, eta=float(cfg.get("eta", 0.05)), x_cap=int(cfg.get("x_cap", 4096)), name=cfg.get("name"))
    if "p" not in cfg or "q" not in cfg or "p0" not in cfg:
        raise ValueError("table chains need p0, p and q")
    return BirthDeathChain(
        p0=float(cfg["p0"]),
        p=cfg["p"],
        q=cfg["q"],
        eta=cfg.get("eta"),
        name=cfg.get("name", "table"),
    )


def load_chain(path) -> BirthDeathChain:
    with open(path) as fh:
        return chain_from_config(json.load(fh))
