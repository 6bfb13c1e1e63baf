import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from persistkit.chains import (
    BesselLikeSpec,
    BirthDeathChain,
    ClampWarning,
    OddFunctional,
    chain_from_config,
    classify_recurrence,
    load_chain,
    make_bessel_like,
    simple_random_walk,
    simulate_path,
    tau1_tail,
)
from persistkit.combinatorics import g_exact
from persistkit.persistence import simulate_batch
from persistkit.sampling import RandomStream


def quiet_bessel(**kw):
    eta = kw.pop("eta", 0.05)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClampWarning)
        return make_bessel_like(BesselLikeSpec(**kw), eta=eta)


def test_bessel_delta0_is_srw():
    ch = make_bessel_like(BesselLikeSpec(0.0))
    up, down = ch.tables(50)
    assert np.all(up == 0.5) and np.all(down == 0.5)
    assert ch.simple and ch.is_periodic


def test_bessel_delta2_clamps_and_p10():
    with pytest.warns(ClampWarning):
        ch = make_bessel_like(BesselLikeSpec(2.0), eta=0.05)
    up, down = ch.tables(10)
    assert up[1] == pytest.approx(0.05)
    assert up[10] == pytest.approx(0.45)
    assert ch.n_clamped == 1


def test_lazification_keeps_jump_chain():
    lazy = quiet_bessel(delta=1.0, laziness=0.3)
    plain = quiet_bessel(delta=1.0)
    ul, dl = lazy.tables(100)
    up, dp = plain.tables(100)
    np.testing.assert_allclose(ul[1:] / (ul[1:] + dl[1:]), up[1:] / (up[1:] + dp[1:]))
    np.testing.assert_allclose(ul[1:] + dl[1:], 0.7)
    assert lazy.p0 == pytest.approx(0.35)
    assert not lazy.is_periodic


def test_bessel_row_fn_beyond_table():
    ch = quiet_bessel(delta=1.0)
    up, _ = ch.tables(ch.x_cap + 10)
    x = ch.x_cap + 10
    assert up[-1] == pytest.approx(0.5 * (1 - 1.0 / (2 * x)))


def test_bessel_validation():
    with pytest.raises(ValueError):
        make_bessel_like(BesselLikeSpec(1.0), eta=0.5)
    with pytest.raises(ValueError):
        make_bessel_like(BesselLikeSpec(1.0, epsilon_fn=lambda x: np.full(np.shape(x), np.nan)))
    with pytest.raises(ValueError):
        BesselLikeSpec(1.0, laziness=1.0)


def test_slowly_varying_and_alpha():
    spec = BesselLikeSpec(0.5, epsilon_fn=lambda x: 1.0 / np.asarray(x, dtype=float))
    assert spec.alpha == 0.75
    assert spec.slowly_varying_L(3) == pytest.approx(math.exp(1 + 1 / 4 + 1 / 9))


def test_chain_validation():
    with pytest.raises(ValueError):
        BirthDeathChain(0.6, [0.5], [0.5])
    with pytest.raises(ValueError):
        BirthDeathChain(0.5, [0.7], [0.5])
    with pytest.raises(ValueError):
        BirthDeathChain(0.5, [0.5], [0.0])
    with pytest.raises(ValueError):
        BirthDeathChain(0.5, [0.01], [0.99], eta=0.05)


@given(st.sampled_from(["identity", "sign", "power"]), st.floats(min_value=-0.9, max_value=3.0),
       st.integers(min_value=-10**6, max_value=10**6))
def test_odd_functional_invariants(kind, gamma, x):
    f = OddFunctional(kind, gamma)
    assert f.scalar(x) == -f.scalar(-x)
    assert x * f.scalar(x) >= 0
    assert f.scalar(0) == 0
    assert f(np.array([x]))[0] == pytest.approx(f.scalar(x))


def test_odd_functional_validation():
    with pytest.raises(ValueError):
        OddFunctional("cube")
    with pytest.raises(ValueError):
        OddFunctional("power", -1.0)
    assert OddFunctional("power", 0.5).name == "power(0.5)"


def test_simulate_path_one_step():
    srw = simple_random_walk()
    hits = sum(simulate_path(srw, "identity", 1, rng=RandomStream(i)).strict_persisted for i in range(4000))
    assert abs(hits / 4000 - 0.5) < 3 * 0.5 / math.sqrt(4000)


def test_simulate_path_reproducible():
    srw = simple_random_walk()
    a = simulate_path(srw, "identity", 200, rng=RandomStream(11), record=True)
    b = simulate_path(srw, "identity", 200, rng=RandomStream(11), record=True)
    assert a.local_time == b.local_time and a.endpoint == b.endpoint and a.first_failure == b.first_failure
    np.testing.assert_array_equal(a.trajectory, b.trajectory)


@pytest.mark.parametrize("lazy", [False, True])
def test_simulate_path_matches_kernel(lazy):
    chain = quiet_bessel(delta=1.0, laziness=0.2) if lazy else simple_random_walk()
    for i in range(30):
        stream = RandomStream(100 + i)
        p = simulate_path(chain, "sign", 300, rng=stream.spawn(0))
        b = simulate_batch(chain, "sign", [300], 1, stream, chunk_size=1)
        assert (b.strict_fail[0] > 300) == p.strict_persisted
        assert b.endpoint[0, 0] == p.endpoint and b.local_time[0, 0] == p.local_time
        assert b.strict_fail[0] == (p.first_failure or 301)


@given(st.integers(min_value=0, max_value=10**6), st.sampled_from(["identity", "sign", "power(0.5)"]))
def test_path_invariants(seed, f):
    chain = simple_random_walk()
    p = simulate_path(chain, f, 120, rng=RandomStream(seed), record=True)
    traj = p.trajectory
    assert p.local_time == len(p.return_times) == int(np.sum(traj[1:] == 0))
    assert all(b > a for a, b in zip(p.return_times, p.return_times[1:]))
    if p.strict_persisted:
        assert p.weak_persisted
    # no sign change of f(X) inside an excursion
    bounds = [0] + p.return_times + [len(traj) - 1]
    for a, b in zip(bounds, bounds[1:]):
        seg = traj[a + 1 : b + 1]
        seg = seg[seg != 0]
        assert np.all(seg > 0) or np.all(seg < 0)
    s = simulate_path(chain, f, 120, mode="strict", rng=RandomStream(seed))
    assert s.strict_persisted == p.strict_persisted


def test_simulate_path_rejects_bad_input():
    with pytest.raises(ValueError):
        simulate_path(simple_random_walk(), "identity", 0)
    with pytest.raises(ValueError):
        simulate_path(simple_random_walk(), "identity", 5, mode="nope")


def test_path_law_symmetry():
    b = simulate_batch(quiet_bessel(delta=0.5, laziness=0.1), "identity", [64], 100_000, RandomStream(3),
                       targets=["Eg_Ln"])
    x = b.endpoint[:, 0]
    for k in (1, 3, 5):
        a = np.mean(x == k)
        c = np.mean(x == -k)
        assert abs(a - c) < 3 * math.sqrt((a + c) / x.size)


@pytest.mark.parametrize("delta, expected", [(0.0, "null_recurrent"), (3.0, "positive_recurrent"),
                                             (-2.0, "transient"), (-1.0, "inconclusive"), (1.05, "inconclusive")])
def test_classify_recurrence(delta, expected):
    ch = simple_random_walk() if delta == 0 else quiet_bessel(delta=delta)
    rep = classify_recurrence(ch)
    assert rep.classification == expected
    if delta != 0:
        assert rep.diagnostics["lambda_exponent"] == pytest.approx(delta, abs=0.05)


def test_classify_table_chain():
    ch = BirthDeathChain(0.5, [0.4] * 10, [0.6] * 10)
    assert classify_recurrence(ch, x_max=1000).classification == "positive_recurrent"


def test_tau1_srw_small():
    t = tau1_tail(simple_random_walk(), 10)
    assert t.tail[1] == 1.0 and t.pmf[2] == 0.5 and t.pmf[1] == 0.0


def test_tau1_srw_exact_law():
    # P(tau_1 > 2m) = g(m) for the simple walk
    t = tau1_tail(simple_random_walk(), 2000)
    for m in range(1, 1001):
        assert t.tail[2 * m] == pytest.approx(float(g_exact(m)), rel=1e-10)
    assert t.lost_mass < 1e-40 and t.reliable


def test_tau1_alpha_fit_srw():
    t = tau1_tail(simple_random_walk(), 100_000, fit_from=1000)
    assert t.alpha_fit == pytest.approx(0.5, abs=0.03)


def test_tau1_positive_recurrent():
    ch = quiet_bessel(delta=3.0, laziness=0.3)
    t = tau1_tail(ch, 20_000)
    assert t.mean_truncated == pytest.approx(ch.stationary_mean_return_time(), rel=1e-3)
    assert t.alpha_fit == pytest.approx(2.0, abs=0.1)


def test_tau1_truncated_mean_converges():
    # alpha = 1.25 > 1: mu(n) increases to a finite limit, increments shrink like n^(-1/4)
    ch = quiet_bessel(delta=1.5)
    t = tau1_tail(ch, 100_000)
    limit = ch.stationary_mean_return_time()
    assert math.isfinite(limit)
    mu = t.mu
    incs = [mu[n] - mu[n // 2] for n in (1000, 10_000, 100_000)]
    assert incs[0] > incs[1] > incs[2] > 0
    assert mu[-1] < limit
    assert limit - mu[-1] < 0.1 * limit


def test_tau1_mass_tracking():
    t = tau1_tail(quiet_bessel(delta=-0.5), 5000, window=20)
    assert t.lost_mass > 0 and not t.reliable
    assert np.all(np.diff(t.tail) <= 1e-15)


def test_stationary_mean_return_time_lazy():
    # geometric holding at 0 only: mean return 1 + 2 * sum pi(x)/pi(0)
    ch = BirthDeathChain(0.25, [0.3] * 50, [0.6] * 50)
    up, down = ch.tables(10**5)
    ratio = [0.25 / 0.6]
    for x in range(1, 2000):
        ratio.append(ratio[-1] * 0.3 / 0.6)
    assert ch.stationary_mean_return_time() == pytest.approx(1 + 2 * sum(ratio), rel=1e-12)
    assert ch.stationary_mean_return_time() == pytest.approx(tau1_tail(ch, 5000).mean_truncated, rel=1e-9)


def test_chain_config(tmp_path):
    ch = chain_from_config({"kind": "bessel", "delta": 3, "laziness": 0.3, "name": "b3"})
    assert ch.name == "b3" and ch.p0 == pytest.approx(0.35)
    ch = chain_from_config({"kind": "bessel", "delta": 0.5, "epsilon": {"formula": "power", "scale": 1.0, "exponent": 1}})
    assert ch.bessel.epsilon(np.array([2]))[0] == pytest.approx(0.5)
    ch = chain_from_config({"kind": "bessel", "delta": 0.5, "epsilon": {"table": [0.1, 0.2]}})
    assert list(ch.bessel.epsilon(np.array([1, 2, 3]))) == [0.1, 0.2, 0.0]
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"kind": "table", "p0": 0.5, "p": [0.5], "q": [0.5]}))
    assert load_chain(p).x_cap == 1
    with pytest.raises(Exception):
        chain_from_config({"kind": "bessel", "delta": "x"})
    with pytest.raises(ValueError):
        chain_from_config({"kind": "table"})
