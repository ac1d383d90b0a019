import math

import numpy as np
import pytest
from scipy import stats

from distbh._normal import standard_normal, two_sided_pvalue
from distbh.datagen import (AlternativeModel, Dependence, NodeGenSpec, SeedPolicy, alt_count,
                            gen_ar1, gen_block, gen_mixture_batch, gen_node_batch, node_sizes)

ALT = AlternativeModel(3.0)


def rng(seed=0):
    return np.random.default_rng(seed)


def test_two_sided_pvalue_against_erf():
    for x in (0.0, 1.959964, -1.959964, 0.3, -2.7, 5.0):
        ref = 2.0 * (1.0 - 0.5 * (1.0 + math.erf(abs(x) / math.sqrt(2.0))))
        assert two_sided_pvalue(x) == pytest.approx(ref, abs=1e-15)
    assert two_sided_pvalue(0.0) == 1.0
    assert two_sided_pvalue(1.959964) == pytest.approx(0.05, abs=1e-6)


def test_pvalue_monotone_in_abs_statistic():
    x = np.linspace(0, 8, 2001)
    p = two_sided_pvalue(x)
    assert np.all(np.diff(p) < 0)


def test_standard_normal_is_inversion():
    a = standard_normal(rng(5), 4)
    u = rng(5).random(4)
    np.testing.assert_array_equal(a, stats.norm.ppf(u))


def test_alternative_model_support():
    mu = ALT.sample(rng(), 100_000)
    a = np.abs(mu)
    assert a.min() >= 2.5 and a.max() <= 3.5
    assert 0.49 < np.mean(mu > 0) < 0.51
    one = AlternativeModel(3.0, 0.0, symmetric=False).sample(rng(), 10)
    assert np.all(one == 3.0)
    with pytest.raises(ValueError):
        AlternativeModel(0.4, 0.5)


def test_null_batch_uniform():
    b = gen_node_batch(NodeGenSpec(100_000, 0, ALT), rng(1))
    assert b.is_null.all()
    assert stats.kstest(b.pvalues, "uniform").pvalue > 0.01


@pytest.mark.parametrize("dep, stride", [
    (Dependence("ar1", 0.8), 100),      # 0.8**100 ~ 2e-10: thinned draws are independent
    (Dependence("block", 0.8, 20), 20),  # one draw per block
])
def test_null_marginals_uniform_under_dependence(dep, stride):
    b = gen_node_batch(NodeGenSpec(100_000 * stride, 0, ALT, dep), rng(2))
    assert stats.kstest(b.pvalues[::stride], "uniform").pvalue > 0.01


def test_ar1_rho_zero_is_independent_stream():
    spec_i = NodeGenSpec(500, 50, ALT)
    spec_a = NodeGenSpec(500, 50, ALT, Dependence("ar1", 0.0))
    a, b = gen_node_batch(spec_i, rng(9)), gen_node_batch(spec_a, rng(9))
    np.testing.assert_array_equal(a.pvalues, b.pvalues)
    np.testing.assert_array_equal(a.is_null, b.is_null)
    np.testing.assert_array_equal(gen_ar1(100, 0.0, rng(3)), standard_normal(rng(3), 100))


def test_ar1_covariance():
    x = gen_ar1(1_000_000, 0.8, rng(4))
    assert x[0] == standard_normal(rng(4), 1)[0]
    assert np.mean(x[1:] * x[:-1]) == pytest.approx(0.8, abs=0.01)
    assert np.mean(x[2:] * x[:-2]) == pytest.approx(0.64, abs=0.01)
    assert np.var(x) == pytest.approx(1.0, abs=0.01)


def test_block_covariance():
    m, blk = 4_000_000, 20
    x = gen_block(m, 0.8, blk, rng(6)).reshape(-1, blk)
    # mean product over the 190 within-block pairs, and across adjacent blocks
    s = x.sum(axis=1)
    within = np.mean((s * s - (x * x).sum(axis=1)) / (blk * (blk - 1)))
    across = np.mean(x[1:, 0] * x[:-1, -1])
    assert within == pytest.approx(0.8, abs=0.01)
    assert across == pytest.approx(0.0, abs=0.01)
    assert np.var(x) == pytest.approx(1.0, abs=0.01)


def test_block_rho_zero_independent():
    x = gen_block(100_000, 0.0, 20, rng(7))
    assert abs(np.mean(x[1:] * x[:-1])) < 0.01


@pytest.mark.parametrize("bad", [-0.1, 1.0])
def test_rho_domain(bad):
    with pytest.raises(ValueError):
        gen_ar1(10, bad, rng())
    with pytest.raises(ValueError):
        gen_block(10, bad, 20, rng())


def test_label_counts_and_shuffle():
    spec = NodeGenSpec(1000, 137, ALT)
    b = gen_node_batch(spec, rng(8))
    assert b.m1 == 137
    idx = np.flatnonzero(~b.is_null)
    assert idx.min() < 100 and idx.max() > 900  # not packed at one end
    # alternatives carry small p-values on average
    assert np.median(b.pvalues[idx]) < 0.05


def test_seed_policy_determinism_and_distinct_streams():
    pol = SeedPolicy(42)
    spec = NodeGenSpec(300, 30, ALT, Dependence("block", 0.5))
    a = gen_node_batch(spec, pol.stream(3, 7))
    b = gen_node_batch(spec, pol.stream(3, 7))
    np.testing.assert_array_equal(a.pvalues, b.pvalues)
    draws = {pol.stream(t, n).random() for t in range(5) for n in range(1, 6)}
    assert len(draws) == 25


def test_mixture_batch_null_fraction():
    b = gen_mixture_batch(200_000, 0.8, ALT, rng(10))
    assert b.m0 / b.m == pytest.approx(0.8, abs=0.005)


def test_node_sizes():
    s = node_sizes(10_000, 50, "power")
    assert s[49] == 10_000
    assert s[24] == 251
    assert node_sizes(100, 50, "uniform") == [100] * 50
    with pytest.raises(ValueError):
        node_sizes(100, 5, "other")


def test_alt_count():
    assert alt_count(0.3 * (10 / 50), 100) == 6
    assert alt_count(0.3 * (1 / 50), 100) == 0
    assert alt_count(0.3, 10**4) == 3000
