"""Exit criteria, one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from persistkit.asymptotics import AsymptoticsSpec, c_alpha, c_alpha_monte_carlo, envelope, fit_power_law
from persistkit.chains import BesselLikeSpec, make_bessel_like, simple_random_walk, tau1_tail
from persistkit.cli import main
from persistkit.combinatorics import convolution_identity_residual, g_exact, ladder_epoch_pmf_series
from persistkit.exact_oracle import (
    WeightVector,
    counterexample_a,
    counterexample_b_search,
    enumerate_persistence,
    random_weight_vector,
    srw_persistence_enumeration,
    srw_persistence_profile,
    w_distribution_check,
)
from persistkit.persistence import sandwich_check, simulate_batch
from persistkit.sampling import RandomStream

pytestmark = pytest.mark.acceptance

SEED = 20240601
TRIALS = 10**6


@pytest.fixture(scope="module")
def lazy_delta3():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return make_bessel_like(BesselLikeSpec(delta=3.0, laziness=0.3))


@pytest.fixture(scope="module")
def lazy_delta3_batch(lazy_delta3):
    t0 = time.perf_counter()
    batch = simulate_batch(lazy_delta3, "identity", [10_000], TRIALS, RandomStream(SEED, 7))
    return batch, time.perf_counter() - t0


def test_criterion_01_universal_persistence_identity(criterion):
    t0 = time.perf_counter()
    gen = RandomStream(SEED, 1).generator()
    bad = []
    for n in range(1, 8):
        g = g_exact(n)
        count = math.prod(range(1, 2 * n, 2))
        for _ in range(50):
            x = random_weight_vector(n, gen)
            assert x.satisfies_H
            r = enumerate_persistence(x)
            if not (r.p_strict == r.p_weak == g and r.strict_count == count):
                bad.append(x)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    criterion(1, ok, f"350 vectors, {len(bad)} mismatches, {dt:.1f}s (limit 120s)")
    assert ok


def test_criterion_02_general_inequality(criterion):
    gen = RandomStream(SEED, 2).generator()
    bad, strict_gaps = [], 0
    for n in range(2, 8):
        g = g_exact(n)
        for _ in range(50):
            x = random_weight_vector(n, gen, distinct_sums=False)
            assert not x.satisfies_H
            r = enumerate_persistence(x)
            if not r.p_strict <= g <= r.p_weak:
                bad.append(x)
            strict_gaps += r.p_strict < r.p_weak
    ok = not bad
    criterion(2, ok, f"300 repeated-entry vectors, {len(bad)} violations, {strict_gaps} with p_strict < p_weak")
    assert ok


def test_criterion_03_argmax_law(criterion):
    gen = RandomStream(SEED, 3).generator()
    checked, bad = 0, []
    for n in range(1, 7):
        for _ in range(10):
            x = random_weight_vector(n, gen)
            ok, res = w_distribution_check(x)
            checked += 1
            if not ok:
                bad.append((x, res))
    ok = not bad
    criterion(3, ok, f"{checked} vectors, n <= 6, all l exact")
    assert ok


def test_criterion_04_convolution_and_ladder(criterion):
    resid = convolution_identity_residual(500)
    series = ladder_epoch_pmf_series(500)
    diffs_ok = all(series[n - 1] == g_exact(n - 1) - g_exact(n) for n in range(1, 501))
    ok = resid == 0 and diffs_ok
    criterion(4, ok, f"residual={resid}, ladder pmf == g(n-1)-g(n) for n <= 500: {diffs_ok}")
    assert ok


def test_criterion_05_atomic_case(criterion):
    strict = srw_persistence_profile(2000, True)
    weak = srw_persistence_profile(2000, False)
    bad = []
    for steps in range(2, 2001, 2):
        g = g_exact(steps // 2)
        if strict[steps - 1] != g / 2 or weak[steps - 1] != g:
            bad.append(steps)
    for steps in range(2, 17, 2):
        if strict[steps - 1] != srw_persistence_enumeration(steps, True):
            bad.append(("enum", steps))
        if weak[steps - 1] != srw_persistence_enumeration(steps, False):
            bad.append(("enum", steps))
    ok = not bad
    criterion(5, ok, "strict = g(n)/2, weak = g(n) for 2n <= 2000; enumeration agrees for 2n <= 16")
    assert ok


def test_criterion_06_counterexamples(criterion):
    a1 = counterexample_a(WeightVector((5, 2, 1)))
    a2 = counterexample_a(WeightVector((3, 2, 1)))
    b = counterexample_b_search(WeightVector((5, 2, 1)))
    marg = b.law.sign_marginal()
    ok = a1.p_strict != a2.p_strict and b.separates and all(v == Fraction(1, 8) for v in marg.values())
    criterion(
        6,
        ok,
        f"(a): {a1.p_strict} vs {a2.p_strict}; (b): {b.result.p_strict} vs {b.contrast_result.p_strict}",
    )
    assert ok


@pytest.mark.slow
def test_criterion_07_sandwich(criterion, lazy_delta3, lazy_delta3_batch):
    srw = simple_random_walk()
    t0 = time.perf_counter()
    reports = [
        sandwich_check(srw, "identity", 2**10, TRIALS, RandomStream(SEED, 70)),
        sandwich_check(srw, "identity", 2**12, TRIALS, RandomStream(SEED, 71)),
    ]
    batch, t_batch = lazy_delta3_batch
    reports.append(sandwich_check(lazy_delta3, "identity", 10_000, None, batch=batch))
    dt = time.perf_counter() - t0 + t_batch
    for r in reports:
        for c in r.checks:
            print(f"  {r.chain_id} n={r.n}: {c.describe()}")
    ok = all(r.passed for r in reports) and dt < 600
    criterion(7, ok, f"3 cases x 1e6 common paths, {sum(len(r.checks) for r in reports)} inequalities, {dt:.0f}s (limit 600s)")
    assert ok


@pytest.mark.slow
def test_criterion_08_sinai_exponents(criterion):
    srw = simple_random_walk()
    grid = [2**k for k in range(8, 16)]
    batch = simulate_batch(srw, "identity", grid, TRIALS, RandomStream(SEED, 8), targets=["strict", "strict_bridge"])
    strict = [batch.estimate("strict", n) for n in grid]
    bridge = [batch.estimate("strict_bridge", n) for n in grid if n <= 2**14]
    f_s = fit_power_law([(e.n, e.point, e.half_width) for e in strict])
    f_b = fit_power_law([(e.n, e.point, e.half_width) for e in bridge])
    ell = math.sqrt(2 / math.pi)
    spec = AsymptoticsSpec(alpha=0.5, ell=lambda n: ell, period=2)
    in_band = True
    for e in strict:
        lo, hi = envelope(spec, e.n)
        in_band &= lo - e.half_width <= e.point <= hi + e.half_width
    for e in bridge:
        lo, hi = envelope(spec, e.n, "bridge", local_tail_condition=True)
        in_band &= lo - e.half_width <= e.point <= hi + e.half_width
    ok = abs(f_s.exponent + 0.25) <= 0.05 and abs(f_b.exponent + 0.75) <= 0.10 and in_band
    criterion(
        8,
        ok,
        f"strict exponent {f_s.exponent:.4f} (target -0.25 +- 0.05), bridge {f_b.exponent:.4f} "
        f"(target -0.75 +- 0.10), band membership {in_band}",
    )
    assert ok


@pytest.mark.slow
def test_criterion_09_positive_recurrent_level(criterion, lazy_delta3, lazy_delta3_batch):
    batch, _ = lazy_delta3_batch
    n = 10_000
    e = batch.estimate("Eg_Ln", n)
    dp = tau1_tail(lazy_delta3, 50_000)
    mean_tau = dp.mean_truncated
    lhs = math.sqrt(math.pi * n) * e.point
    rel = abs(lhs / math.sqrt(mean_tau) - 1)
    ok = rel <= 0.05 and dp.reliable
    criterion(9, ok, f"sqrt(pi n) E[g(L_n)] = {lhs:.5f}, sqrt(E tau_1) = {math.sqrt(mean_tau):.5f} (DP), rel {rel:.2e}")
    assert ok


def test_criterion_10_stable_constants(criterion):
    deltas = {}
    for i, a in enumerate((0.2, 0.5, 0.8)):
        m, _ = c_alpha_monte_carlo(a, 10**6, RandomStream(SEED, 10).spawn(i))
        deltas[a] = abs(m / c_alpha(a) - 1)
    ok = max(deltas.values()) <= 0.01 and c_alpha(0.0) == math.sqrt(math.pi) and c_alpha(1.0) == 1.0
    criterion(10, ok, "rel deltas " + ", ".join(f"{a}: {d:.2e}" for a, d in deltas.items()) + "; c_0 = sqrt(pi), c_1 = 1")
    assert ok


@pytest.mark.xfail(strict=True, reason="per-path f-invariance does not hold; counterexample X=(1,0,1,0,1,0,-1,-2)")
def test_criterion_11_f_invariance(criterion):
    srw = simple_random_walk()
    n, m = 2**10, 10**5
    ind = {}
    for f in ("identity", "sign", "power(0.5)"):
        b = simulate_batch(srw, f, [n], m, RandomStream(SEED, 11), targets=["strict", "Eg_Ln"])
        ind[f] = b.values("strict", n)
    diff = {f: int(np.sum(ind[f] != ind["identity"])) for f in ("sign", "power(0.5)")}
    ok = all(v == 0 for v in diff.values())
    criterion(11, ok, f"paths with differing strict indicator vs identity: {diff} of {m} (known false, see ledger)")
    assert ok


def test_criterion_12_reproducibility(criterion, tmp_path):
    configs = {
        "verify": {"n_cap": 4, "vectors_per_n": 5, "srw_dp_max_steps": 200, "identity_n_max": 100, "g_n_max": 200},
        "enumerate": {"x": [1, "1/3", 4, 9]},
        "simulate": {"horizons": [32, 128], "targets": ["strict", "weak_bridge", "Eg_Ln"], "trials": 20_000,
                     "chunk_size": 4096},
        "scaling": {"horizons": [64, 128, 256, 512], "trials": 20_000, "chunk_size": 4096, "expected_exponent": None},
        "constants": {"alphas": [0, 0.3, 0.7, 1], "mc_samples": 50_000},
    }
    mismatched = []
    for cmd, cfg in configs.items():
        path = tmp_path / f"{cmd}.json"
        path.write_text(json.dumps(cfg))
        for fmt in ("csv", "json"):
            outs = []
            for run in range(2):
                d = tmp_path / f"{cmd}-{fmt}-{run}"
                code = main([cmd, "--config", str(path), "--seed", "17", "--threads", "2", "--format", fmt, "--out", str(d)])
                outs.append((code, {p.name: p.read_bytes() for p in sorted(d.iterdir())}))
            if outs[0] != outs[1] or not outs[0][1]:
                mismatched.append((cmd, fmt))
    ok = not mismatched
    criterion(12, ok, f"5 commands x 2 formats rerun byte-identical; mismatches: {mismatched}")
    assert ok
