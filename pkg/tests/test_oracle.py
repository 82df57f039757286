import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unbiased_ea import distributions as dist
from unbiased_ea import drift, objectives, oracle
from unbiased_ea.errors import TooLarge, UnreachableOptimum
from unbiased_ea.objectives import BitString


def test_rls_onemax_n4():
    sol = oracle.level_chain(objectives.make_onemax(4), dist.make_rls(4))
    assert sol.time_from(0) == pytest.approx(25 / 3, abs=1e-12)
    exact = oracle.level_chain_exact(objectives.make_onemax(4), [0, Fraction(1), 0, 0, 0])
    assert exact[0] == Fraction(25, 3)


def test_rls_onemax_harmonic_from_zero():
    n = 100
    sol = oracle.level_chain(objectives.make_onemax(n), dist.make_rls(n))
    assert sol.time_from(0) == pytest.approx(n * math.fsum(1 / k for k in range(1, n + 1)), abs=1e-9)


def test_absorbing_states_zero_others_positive():
    sol = oracle.level_chain(objectives.make_onemax(12), dist.make_standard_bit_mutation(12, 1.0))
    assert sol.expected_time[12] == 0
    assert np.all(sol.expected_time[:12] > 0) and np.all(np.isfinite(sol.expected_time))


def test_complement_operator_reachability():
    sol = oracle.level_chain(objectives.make_onemax(4), dist.make_point_mass(4, 4))
    assert sol.time_from(0) == 1
    with pytest.raises(UnreachableOptimum):
        sol.time_from(1)
    with pytest.raises(UnreachableOptimum):
        sol.uniform_start_mean()


def test_parity_swap_relabelled_equals_rls():
    n = 8
    a = oracle.level_chain(objectives.make_parity_swap(n), dist.make_point_mass(n, n - 1))
    b = oracle.level_chain(objectives.make_onemax(n), dist.make_rls(n))
    for k in range(n + 1):
        j = k if k % 2 == 0 else n - k
        assert a.expected_time[k] == pytest.approx(b.expected_time[j], rel=1e-9)


@settings(max_examples=25)
@given(st.integers(2, 9), st.lists(st.integers(0, 5), min_size=10, max_size=10))
def test_level_chain_matches_rational(n, raw):
    raw = raw[: n + 1]
    raw[1] += 1
    total = sum(raw)
    probs = [Fraction(v, total) for v in raw]
    exact = oracle.level_chain_exact(objectives.make_onemax(n), probs)
    sol = oracle.level_chain(objectives.make_onemax(n), dist.make_custom(n, [float(p) for p in probs]))
    for m in range(n + 1):
        assert sol.expected_time[m] == pytest.approx(float(exact[m]), rel=1e-13)


def test_full_chain_matches_level_chain():
    f, d = objectives.make_onemax(8), dist.make_standard_bit_mutation(8, 1.0)
    full = oracle.full_chain(f, d)
    level = oracle.level_chain(f, d)
    pc = np.array([bin(s).count("1") for s in range(256)])
    np.testing.assert_allclose(full.expected_time, level.expected_time[pc], rtol=1e-9)


def test_full_chain_linear_rls():
    sol = oracle.full_chain(objectives.make_linear([1, 2, 4]), dist.make_rls(3))
    assert sol.time_from(0) == pytest.approx(3 * (1 + 1 / 2 + 1 / 3), rel=1e-12)
    assert sol.time_from(7) == 0


def test_full_chain_too_large():
    with pytest.raises(TooLarge):
        oracle.full_chain(objectives.make_onemax(17), dist.make_rls(17))


def test_no_domination_n20():
    n = 20
    p1, p2 = n**-2, 1 - n**-2
    d = dist.make_custom(n, [0, p1, p2] + [0] * (n - 2))
    sol = oracle.compressed_anchored_chain(1.0, n, d)
    level = oracle.level_chain(objectives.make_onemax(n), d)
    t1, t2 = level.time_from(n - 1), level.time_from(n - 2)
    assert t1 == pytest.approx(8000, abs=1e-9)
    pa, pb = 2 * p1 / n, p2 / math.comb(n, 2)
    assert t2 == pytest.approx(1 / (pa + pb) + pa / (pa + pb) * 8000, rel=1e-12)
    assert t2 == pytest.approx(545.45, abs=0.01)
    assert t2 < t1
    # with anchor weight 1 the compressed chain is the level chain
    assert sol.time_from(1 * n + n - 2) == pytest.approx(t1, rel=1e-12)


def test_anchored_weight_one_reduces_to_level_chain():
    n = 10
    d = dist.make_power_law(n, 2.0)
    anch = oracle.compressed_anchored_chain(1.0, n, d)
    level = oracle.level_chain(objectives.make_onemax(n), d)
    for b in (0, 1):
        for m in range(n):
            assert anch.expected_time[b * n + m] == pytest.approx(level.expected_time[b + m], rel=1e-9)


def test_anchored_compressed_matches_full_chain():
    n = 9
    d = dist.make_power_law(n, 1.5)
    anch = oracle.compressed_anchored_chain(3.0, n, d)
    full = oracle.full_chain(objectives.make_anchored(n, 3.0), d)
    for s in range(2**n):
        x = BitString.from_int(s, n)
        assert full.expected_time[s] == pytest.approx(anch.expected_time[oracle.anchored_state(x)], rel=1e-9)
    assert full.uniform_start_mean() == pytest.approx(anch.uniform_start_mean(), rel=1e-9)


def test_onemax_not_easiest_n14():
    n = 14
    probs = np.zeros(n + 1)
    probs[1], probs[2] = n**-3, 1 / n
    probs[3] = 1 - probs[1] - probs[2]
    d = dist.make_custom(n, probs)
    start = BitString(np.array([0] + [1] * (n - 1), dtype=np.uint8))
    t_anch = oracle.compressed_anchored_chain(3.0, n, d).time_from(oracle.anchored_state(start))
    t_om = oracle.level_chain(objectives.make_onemax(n), d).time_from(start.ones)
    assert t_anch < t_om


def test_exact_step_drift_examples():
    f, d = objectives.make_onemax(4), dist.make_rls(4)
    x = BitString.from_str("0011")
    # every single flip from OM = 2 lands at distance 1
    assert oracle.exact_step_drift(f, d, x) == 1.0
    assert drift.h_tilde(d, 2) == pytest.approx(1.0, rel=1e-14)
    # wrong-bit count under elitist selection: only the 2 of 4 improving flips count
    pw = drift.potential_weights(d, 2.0, f)
    assert oracle.exact_step_drift(f, d, x, pw) == pytest.approx(0.5, rel=1e-14)
    assert oracle.exact_step_drift(f, d, BitString.all_ones(4)) == 0
    bv = objectives.make_binval(4)
    assert oracle.exact_step_drift(bv, d, BitString.all_ones(4), drift.potential_weights(d, 2.0, bv)) == 0


def test_distance_closed_form_matches_enumeration():
    n = 11
    f = objectives.make_onemax(n)
    d = dist.make_custom(n, np.r_[0, np.linspace(1, 2, n)] / np.linspace(1, 2, n).sum())
    for ones in range(n + 1):
        x = oracle.parent_with_ones(n, ones)
        assert oracle.distance_drift_closed_form(d, ones) == pytest.approx(
            oracle.exact_step_drift(f, d, x), rel=1e-12, abs=1e-15
        )


def test_idle_step_scales_times():
    n = 10
    f = objectives.make_onemax(n)
    base = oracle.level_chain(f, dist.make_rls(n)).expected_time
    lazy = oracle.level_chain(f, dist.mix_idle(dist.make_rls(n), 0.3)).expected_time
    np.testing.assert_allclose(lazy, base / 0.7, rtol=1e-9)
