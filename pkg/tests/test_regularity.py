import math

import pytest
from hypothesis import given, strategies as st

from fibids.approximants import build_band_tree, thinnest_band
from fibids.dynamics import per2_solve
from fibids.errors import DomainError
from fibids.regularity import (
    LOG_INV_ALPHA,
    empirical_holder,
    gamma_k,
    gamma_lower,
    gamma_small,
    gamma_tilde_k,
    gamma_upper,
    holder_bounds,
)
from fibids.trace_core import ALPHA, MU0, fibonacci


def test_gamma_lower_values():
    assert gamma_lower(8) == pytest.approx(3 * LOG_INV_ALPHA / (2 * math.log(38)), rel=1e-14)
    assert gamma_lower(8) == pytest.approx(0.198432, abs=1e-5)
    assert gamma_lower(100) == pytest.approx(0.133604, abs=1e-5)
    with pytest.raises(DomainError):
        gamma_lower(4)


def test_gamma_upper_values():
    # base (lam - 4 + sqrt((lam - 4)^2 - 12))/2 is 3 at lam = 8
    assert gamma_upper(8) == pytest.approx(3 * LOG_INV_ALPHA / (2 * math.log(3)), rel=1e-14)
    base = (96 + math.sqrt(9204)) / 2
    assert gamma_upper(100) == pytest.approx(3 * LOG_INV_ALPHA / (2 * math.log(base)), rel=1e-14)
    assert gamma_upper(100) == pytest.approx(0.158147, abs=1e-5)
    with pytest.raises(DomainError):
        gamma_upper(7.9)


@pytest.mark.parametrize("lam", [8, 16, 100])
def test_upper_exceeds_lower(lam):
    assert gamma_upper(lam) > gamma_lower(lam)


def test_monotone_in_coupling():
    lams = [8, 12, 20, 50, 100]
    lo = [gamma_lower(x) for x in lams]
    up = [gamma_upper(x) for x in lams]
    assert all(a > b for a, b in zip(lo, lo[1:]))
    assert all(a > b for a, b in zip(up, up[1:]))


def test_finite_k_exponents():
    assert gamma_k(5, 6) == pytest.approx(0.097632, abs=1e-5)
    assert gamma_k(5, 6) == pytest.approx(
        3 * LOG_INV_ALPHA / ((2 / 3) * 7 * math.log(32) - math.log(4)), rel=1e-14)
    with pytest.raises(DomainError):
        gamma_k(5, 2)
    with pytest.raises(DomainError):
        gamma_tilde_k(8, 3)


@given(st.floats(4.5, 1000))
def test_gamma_k_increases_to_lower(lam):
    ks = [4, 8, 16, 64, 10**6]
    vals = [gamma_k(lam, k) for k in ks]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(gamma_lower(lam), rel=1e-4)
    assert vals[-1] < gamma_lower(lam)


@given(st.floats(8, 1000))
def test_gamma_tilde_decreases_to_upper(lam):
    vals = [gamma_tilde_k(lam, k) for k in (4, 8, 16, 64, 10**6)]
    assert all(v > gamma_upper(lam) for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(gamma_upper(lam), rel=1e-4)


def test_large_coupling_asymptotics():
    for lam, lo in ((1e3, 0.8), (1e4, 0.85)):
        ratio = gamma_lower(lam) * 2 * math.log(lam) / (3 * LOG_INV_ALPHA)
        assert lo <= ratio <= 1


def test_gamma_small():
    assert gamma_small(0.0, MU0) == pytest.approx(0.5, abs=1e-15)
    assert gamma_small(0.5, per2_solve(0.5).mu_u) < 0.5
    with pytest.raises(DomainError):
        gamma_small(0.1, 1.0)
    lams = (0.4, 0.2, 0.1, 0.05)
    gs = [gamma_small(x, per2_solve(x).mu_u) for x in lams]
    assert all(a < b < 0.5 for a, b in zip(gs, gs[1:]))
    assert gs[-1] > 0.4999


def test_holder_bounds_record():
    hb = holder_bounds(12.0, ks=range(4, 9))
    assert hb.gamma_lower < hb.gamma_upper
    assert [k for k, _, _ in hb.per_k] == list(range(4, 9))
    assert all(g < hb.gamma_lower < gt for _, g, gt in hb.per_k)
    small = holder_bounds(0.1, mu_lambda=per2_solve(0.1).mu_u)
    assert small.gamma_lower is None and 0 < small.gamma_small <= 0.5


@pytest.fixture(scope="module")
def tree8():
    return build_band_tree(8.0, 12)


@pytest.mark.parametrize("k", [4, 7])
def test_empirical_exponent_in_envelope_lambda8(tree8, k):
    (est,) = [e for e in empirical_holder(tree8, [k]) if e.source == "band_pair"]
    band = thinnest_band(tree8, k)
    assert est.scale == band.length
    assert est.delta_N == pytest.approx(ALPHA**k, rel=1e-14)
    assert est.exponent == pytest.approx(k * math.log(ALPHA) / math.log(band.length), rel=1e-14)
    assert est.in_envelope


def test_empirical_exponent_lambda100_k10():
    tree = build_band_tree(100.0, 12)
    (est,) = [e for e in empirical_holder(tree, [10]) if e.source == "band_pair"]
    assert 0.1336 <= est.exponent <= gamma_tilde_k(100, 10)


def test_finite_descendant_ratio(tree8):
    for est in empirical_holder(tree8, range(4, 11)):
        assert est.exponent > 0
        if est.source == "band_pair":
            # a type-B band of level k holds F_{n-k} bands of level n
            assert est.delta_N_finite == fibonacci(12 - est.k) / fibonacci(12)


def test_empirical_requires_depth(tree8):
    with pytest.raises(DomainError):
        empirical_holder(tree8, [13])
