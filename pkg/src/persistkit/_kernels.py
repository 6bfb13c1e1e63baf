"""Compiled inner loops for path simulation and the return-time DP.

Random numbers come exclusively from ``rng.random()`` on a numpy Generator
passed in by the caller, so a kernel run is fully determined by the stream.
Simple random walks take their +-1 steps from the 53 bits of one double
(least significant bit first); all other chains use one double per step.
The pure-Python reference in :func:`persistkit.chains.simulate_path` follows
the same consumption rule.
"""

import numpy as np
from numba import njit

TWO53 = 9007199254740992.0

F_IDENTITY = 0
F_SIGN = 1
F_POWER = 2

EXIT_NONE = 0
EXIT_STRICT = 1
EXIT_WEAK = 2


@njit(nogil=True, cache=True)
def _f_eval(x, kind, gamma):
    if x == 0:
        return 0.0
    if kind == F_IDENTITY:
        return float(x)
    if kind == F_SIGN:
        return 1.0 if x > 0 else -1.0
    ax = float(abs(x)) ** gamma
    return ax if x > 0 else -ax


@njit(nogil=True, cache=True)
def simulate_batch(
    rng,
    n_paths,
    n_max,
    up,
    down,
    simple,
    f_kind,
    f_gamma,
    grid,
    exit_mode,
    strict_fail,
    weak_fail,
    x_at,
    l_at,
):
    """Simulate ``n_paths`` trajectories of length ``n_max`` from 0.

    ``strict_fail[i]`` / ``weak_fail[i]`` receive the first ``k`` with
    ``zeta_k <= 0`` / ``zeta_k < 0`` (``n_max + 1`` if none). ``x_at`` and
    ``l_at`` receive ``X_n`` and ``L_n`` at each horizon of ``grid`` reached
    before an early exit.
    """
    ng = grid.shape[0]
    never = n_max + 1
    for i in range(n_paths):
        x = 0
        zeta = 0.0
        loc = 0
        sf = never
        wf = never
        gi = 0
        bits = np.int64(0)
        nbits = 0
        for k in range(1, n_max + 1):
            if simple:
                if nbits == 0:
                    bits = np.int64(rng.random() * TWO53)
                    nbits = 53
                if bits & 1:
                    x += 1
                else:
                    x -= 1
                bits >>= 1
                nbits -= 1
            else:
                u = rng.random()
                if x == 0:
                    if u < up[0]:
                        x = 1
                    elif u < 2.0 * up[0]:
                        x = -1
                else:
                    ax = x if x > 0 else -x
                    pu = up[ax]
                    if u < pu:
                        ax += 1
                    elif u < pu + down[ax]:
                        ax -= 1
                    x = ax if x > 0 else -ax
            if x == 0:
                loc += 1
            zeta += _f_eval(x, f_kind, f_gamma)
            if sf == never and zeta <= 0.0:
                sf = k
            if wf == never and zeta < 0.0:
                wf = k
            while gi < ng and grid[gi] == k:
                x_at[i, gi] = x
                l_at[i, gi] = loc
                gi += 1
            if exit_mode == EXIT_STRICT and sf != never:
                break
            if exit_mode == EXIT_WEAK and wf != never:
                break
        strict_fail[i] = sf
        weak_fail[i] = wf


@njit(cache=True)
def tau1_forward(n_max, up, down, window):
    """Law of the first return time to 0, by forward DP on ``|X|``.

    Returns ``(pmf, tail, lost)`` with ``pmf[k] = P(tau_1 = k)``,
    ``tail[k] = P(tau_1 > k)`` for ``k = 0..n_max`` and ``lost`` the mass that
    left the height window ``1..window``.
    """
    pmf = np.zeros(n_max + 1)
    tail = np.zeros(n_max + 1)
    tail[0] = 1.0
    if n_max == 0:
        return pmf, tail, 0.0
    p0 = up[0]
    pmf[1] = 1.0 - 2.0 * p0
    cur = np.zeros(window + 2)
    nxt = np.zeros(window + 2)
    cur[1] = 2.0 * p0
    lost = 0.0
    tail[1] = 2.0 * p0
    top = 1
    for t in range(1, n_max):
        pmf[t + 1] = cur[1] * down[1]
        new_top = top + 1 if top < window else window
        alive = 0.0
        for h in range(1, new_top + 1):
            stay = 1.0 - up[h] - down[h]
            m = cur[h] * stay
            if h > 1:
                m += cur[h - 1] * up[h - 1]
            if h < window:
                m += cur[h + 1] * down[h + 1]
            nxt[h] = m
            alive += m
        if top == window:
            lost += cur[window] * up[window]
        for h in range(1, new_top + 2):
            cur[h] = nxt[h]
            nxt[h] = 0.0
        top = new_top
        tail[t + 1] = alive + lost
    return pmf, tail, lost
