import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unbiased_ea import distributions as dist
from unbiased_ea.errors import (
    BetaOutOfRange,
    DegenerateAllZero,
    LengthMismatch,
    NegativeProbability,
    OutOfRange,
    RateOutOfRange,
    SchemaViolation,
    SumOutOfTolerance,
)


def check_invariants(d):
    assert np.all(d.probs >= 0)
    assert abs(math.fsum(d.probs) - 1) <= 1e-12
    assert d.chi == pytest.approx(float(np.dot(np.arange(d.n + 1), d.probs)), rel=1e-12, abs=1e-15)
    assert np.all(np.diff(d.cumulative) >= 0)
    assert abs(d.cumulative[-1] - 1) <= 1e-12


def test_custom_point_mass_at_one():
    d = dist.make_custom(2, [0, 1, 0])
    assert d.p1 == 1.0 and d.chi == 1.0
    check_invariants(d)


def test_custom_mean():
    assert dist.make_custom(3, [0, 0.5, 0.5, 0]).chi == 1.5


def test_custom_errors():
    with pytest.raises(SumOutOfTolerance):
        dist.make_custom(2, [0.5, 0.6, 0])
    with pytest.raises(LengthMismatch):
        dist.make_custom(2, [0.5, 0.5])
    with pytest.raises(NegativeProbability):
        dist.make_custom(2, [-0.5, 1.5, 0])


def test_point_mass():
    rls = dist.make_point_mass(10, 1)
    assert rls.p1 == 1.0 and rls.chi == 1.0
    assert dist.make_point_mass(10, 9).chi == 9.0
    with pytest.raises(OutOfRange):
        dist.make_point_mass(10, 11)


def test_standard_bit_mutation():
    np.testing.assert_allclose(dist.make_standard_bit_mutation(2, 1.0).probs, [0.25, 0.5, 0.25], rtol=1e-14)
    assert dist.make_standard_bit_mutation(100, 1.0).p1 == pytest.approx(0.99**99, rel=1e-12)
    assert 0.99**99 == pytest.approx(0.36973, abs=1e-5)
    with pytest.raises(RateOutOfRange):
        dist.make_standard_bit_mutation(10, 0.0)
    with pytest.raises(RateOutOfRange):
        dist.make_standard_bit_mutation(10, 11.0)


@given(st.integers(1, 300), st.floats(0.05, 1.0))
def test_sbm_mean_is_c(n, frac):
    c = frac * n
    d = dist.make_standard_bit_mutation(n, c)
    assert dist.mean(d) == pytest.approx(c, rel=1e-12)
    check_invariants(d)


def test_power_law_values():
    d = dist.make_power_law(4, 2.0)
    assert d.p1 == pytest.approx(0.8, rel=1e-14)
    assert d[2] == pytest.approx(0.2, rel=1e-14)
    assert d.chi == pytest.approx(1.2, rel=1e-14)
    assert dist.make_power_law(4, 1.5).p1 == pytest.approx(1 / (1 + 2**-1.5), rel=1e-14)
    assert 1 / (1 + 2**-1.5) == pytest.approx(0.73879, abs=1e-5)
    with pytest.raises(BetaOutOfRange):
        dist.make_power_law(10, 1.0)


def test_power_law_mean_bounded_for_beta_above_two():
    beta = 3.0
    chis = [dist.make_power_law(2**k, beta).chi for k in range(2, 17)]
    assert np.all(np.diff(chis) >= 0)
    # the untruncated law has mean zeta(beta - 1) / zeta(beta)
    from scipy.special import zeta

    assert max(chis) < zeta(beta - 1) / zeta(beta)


def test_mean_examples():
    assert dist.mean(dist.make_point_mass(5, 3)) == 3
    assert dist.mean(dist.make_custom(2, [0, 0.5, 0.5])) == 1.5
    assert dist.mean(dist.make_standard_bit_mutation(50, 1.7)) == pytest.approx(1.7, rel=1e-12)


def test_condition_nonzero():
    d = dist.condition_nonzero(dist.make_custom(2, [0.5, 0.25, 0.25]))
    np.testing.assert_allclose(d.probs, [0, 0.5, 0.5])
    same = dist.make_custom(2, [0, 0.25, 0.75])
    assert dist.condition_nonzero(same) == same
    q = dist.condition_nonzero(dist.make_custom(2, [0.5, 0.5, 0]))
    assert q.chi == 1.0
    lazy = dist.make_custom(3, [0.5, 0.25, 0.25, 0])
    assert lazy.chi == 0.75
    assert dist.condition_nonzero(lazy).chi == pytest.approx(1.5, rel=1e-14)
    with pytest.raises(DegenerateAllZero):
        dist.condition_nonzero(dist.make_point_mass(3, 0))


@given(st.lists(st.floats(0, 1), min_size=2, max_size=30), st.floats(0, 0.95))
def test_mix_idle_roundtrip(raw, p0):
    w = np.array(raw)
    w[1] += 1e-3
    n = w.size - 1
    d = dist.make_custom(n, w / w.sum())
    d = dist.condition_nonzero(d) if d.probs[0] < 1 else d
    lazy = dist.mix_idle(d, p0)
    check_invariants(lazy)
    np.testing.assert_allclose(dist.condition_nonzero(lazy).probs, d.probs, atol=1e-12)


def test_sample_point_mass_always_k():
    rng = np.random.default_rng(1)
    d = dist.make_point_mass(6, 3)
    assert set(dist.sample_many(d, rng, 1000).tolist()) == {3}
    assert dist.sample(d, rng) == 3


def test_sample_frequency():
    d = dist.make_custom(2, [0, 0.5, 0.5])
    draws = dist.sample_many(d, np.random.default_rng(20240101), 10**6)
    assert abs(np.mean(draws == 1) - 0.5) <= 0.002
    assert set(np.unique(draws).tolist()) <= {1, 2}


def test_sample_deterministic():
    d = dist.make_power_law(50, 2.5)
    a = dist.sample_many(d, np.random.default_rng(7), 500)
    b = [dist.sample(d, rng) for rng in [np.random.default_rng(7)] for _ in range(500)]
    np.testing.assert_array_equal(a, dist.sample_many(d, np.random.default_rng(7), 500))
    assert len(b) == 500


def test_from_dict_roundtrip():
    for d in (
        dist.make_point_mass(10, 2),
        dist.make_standard_bit_mutation(10, 1.5),
        dist.make_power_law(10, 2.5),
    ):
        assert dist.from_dict(d.to_dict()) == d
    d = dist.from_dict({"kind": "custom", "probs": [0, 0.3, 0.7]}, n=5)
    assert d.n == 5 and d[2] == 0.7 and d[5] == 0
    with pytest.raises(SchemaViolation):
        dist.from_dict({"kind": "sbm"}, n=5)
    with pytest.raises(SchemaViolation):
        dist.from_dict({"kind": "nope"}, n=5)


@settings(max_examples=50)
@given(st.integers(2, 200), st.floats(1.01, 5.0))
def test_power_law_invariants(n, beta):
    d = dist.make_power_law(n, beta)
    check_invariants(d)
    assert np.all(d.probs[n // 2 + 1 :] == 0)
    assert np.all(np.diff(d.probs[1 : n // 2 + 1]) <= 0)
