import math

import numpy as np
import pytest

from entgrowth.coeffs import (EXACT_ZERO, GroundTruth, IndexSequence, abs_source, catalog,
                              catalog_listing, complement, derivative_source, parity_mask,
                              parse_complex, parse_index_sequence, parse_source, polynomial,
                              source_sum, subexponential_diagnostic, zero_source)
from entgrowth.errors import BadParam, NotProper, UnknownId, ZeroAmbiguous
from entgrowth.xarith import xc_log_abs

ALL_SOURCES = [
    ("exp", {}), ("sin", {"lambda": 2}), ("cos", {"lambda": 1}), ("exp_zk", {"k": 3}),
    ("mittag_leffler", {"alpha": 0.5}), ("power_type", {"rho": 2}), ("minimal_type", {"rho": 1}),
    ("maximal_type", {"rho": 1}), ("polynomial", {"coeffs": [1, -2, 3]}), ("sin_plus_cos2", {}),
]


def test_sin2_coeff3():
    c = catalog("sin", **{"lambda": 2}).coeff(3).to_complex()
    assert c.real == pytest.approx(-4 / 3, rel=1e-14) and c.imag == 0


def test_ground_truths():
    assert catalog("sin", **{"lambda": 2}).ground_truth.to_dict() == {
        "order": 1.0, "type_tag": "finite", "type_value": 2.0}
    assert catalog("exp").ground_truth.type == 1.0
    assert catalog("maximal_type", rho=1).ground_truth.type == math.inf
    assert catalog("minimal_type", rho=2).ground_truth.type == 0.0
    assert catalog("polynomial", coeffs=[1, 2]).ground_truth.type is None
    assert catalog("sin_plus_cos2").ground_truth.type == 2.0
    assert catalog("exp_zk", k=3).ground_truth.order == 3.0
    assert catalog("mittag_leffler", alpha=0.25).ground_truth.order == 4.0


def test_power_type_termwise():
    src = catalog("power_type", rho=2)
    n = np.arange(1, 3001)
    terms = n * np.exp((2.0 / n) * src.log_abs_coeffs(n))
    np.testing.assert_allclose(terms, 1.0, rtol=1e-12)


def test_closed_form_log_abs():
    n = np.arange(0, 50)
    lg = np.array([math.lgamma(k + 1) for k in n])
    np.testing.assert_allclose(catalog("exp").log_abs_coeffs(n), -lg, rtol=1e-14)
    ml = catalog("mittag_leffler", alpha=0.5).log_abs_coeffs(n)
    np.testing.assert_allclose(ml, [-math.lgamma(0.5 * k + 1) for k in n], rtol=1e-14, atol=1e-14)
    mt = catalog("maximal_type", rho=2).log_abs_coeffs(np.array([0, 1, 2, 3, 10]))
    assert mt[0] == 0.0 and mt[1] == -math.inf and mt[2] == -math.inf
    assert mt[4] == pytest.approx(-5 * math.log(10 / math.log(10)), rel=1e-14)


def test_errors():
    with pytest.raises(UnknownId):
        catalog("gamma")
    with pytest.raises(BadParam):
        catalog("mittag_leffler", alpha=0)
    with pytest.raises(BadParam):
        catalog("power_type", rho=-1)
    with pytest.raises(BadParam):
        GroundTruth(0.0, "finite", 1.0)


@pytest.mark.parametrize("name,params", ALL_SOURCES)
def test_coeff_agrees_with_log_abs(name, params):
    src = catalog(name, **params)
    for n in (0, 1, 2, 5, 17, 100, 1001, 5000):
        L = src.log_abs_coeff(n)
        x = xc_log_abs(src.coeff(n))
        if math.isfinite(L):
            assert abs(x - L) <= 1e-8 * max(1.0, abs(L))
        else:
            assert x == -math.inf


@pytest.mark.parametrize("name,params", [s for s in ALL_SOURCES if s[0] != "polynomial"])
def test_entirety_diagnostic(name, params):
    assert catalog(name, **params).entirety_diagnostic(2000) < -1.0


@pytest.mark.parametrize("name,params", [("exp", {}), ("sin", {"lambda": 2}), ("cos", {"lambda": 0.5}),
                                         ("sin", {"lambda": "1+1j"}), ("sin_plus_cos2", {})])
def test_derivative_exact_at_zero_matches_coeffs(name, params):
    src = catalog(name, **params)
    ns = np.arange(0, 60)
    Ld, S = src.derivative_log_abs_exact(0, ns)
    L, P = src.coeffs_array(ns)
    lg = np.array([math.lgamma(k + 1) for k in ns])
    nz = np.isfinite(L)
    assert np.all(S[~nz] == EXACT_ZERO)
    np.testing.assert_allclose(Ld[nz] - lg[nz], L[nz], rtol=1e-10, atol=1e-10)
    for n in np.flatnonzero(nz)[:10]:
        ph = src.derivative_exact(0, int(n)).phase()
        assert abs(ph - P[n]) < 1e-10


def test_sin_even_derivative_closed_form():
    lam = 2.0
    src = catalog("sin", **{"lambda": lam})
    z = 0.3 + 0.2j
    for k in range(6):
        expect = (-1) ** k * lam ** (2 * k) * np.sin(lam * z)
        got = src.derivative_exact(z, 2 * k).to_complex()
        assert got == pytest.approx(expect, rel=1e-12)


def test_sin_zero_snapping():
    src = catalog("sin")
    assert src.derivative_exact(math.pi, 2).is_zero
    assert src.derivative_exact(3.14159265358979, 4).is_zero
    assert not src.derivative_exact(3.1415, 4).is_zero


def test_exp_zk_exact_zeros():
    src = catalog("exp_zk", k=3)
    L = src.log_abs_coeffs(np.arange(0, 100))
    for n in range(100):
        assert math.isfinite(L[n]) == (n % 3 == 0)
        assert src.coeff(n).is_zero == (n % 3 != 0)


def test_source_sum_examples():
    s = catalog("sin_plus_cos2")
    assert s.coeff(2).to_complex() == pytest.approx(-2.0)
    assert s.coeff(1).to_complex() == pytest.approx(1.0)
    f = catalog("mittag_leffler", alpha=0.5)
    g = source_sum(f, zero_source())
    n = np.arange(0, 200)
    np.testing.assert_array_equal(g.log_abs_coeffs(n), f.log_abs_coeffs(n))
    assert g.ground_truth is None and not g.has_derivative_exact
    assert s.has_derivative_exact


def test_source_sum_ambiguous_cancellation():
    a = catalog("sin")
    b = source_sum(a, a)
    # both operands vanish exactly at pi, so the sum is a provable zero
    assert b.derivative_exact(math.pi, 0).is_zero
    # cos is even in lambda: no cancellation; sin is odd: total cancellation
    c = source_sum(catalog("cos"), catalog("cos", **{"lambda": -1}))
    assert c.derivative_exact(0.7, 0).to_complex() == pytest.approx(2 * math.cos(0.7))
    d = source_sum(catalog("sin"), catalog("sin", **{"lambda": -1}))
    with pytest.raises(ZeroAmbiguous):
        d.derivative_exact(0.7, 0)


def test_parity_masked_pair():
    ge = parity_mask(catalog("minimal_type", rho=2), 0)
    go = parity_mask(catalog("power_type", rho=1), 1)
    g = source_sum(ge, go)
    n = np.arange(0, 400)
    L = g.log_abs_coeffs(n)
    np.testing.assert_array_equal(L[0::2], catalog("minimal_type", rho=2).log_abs_coeffs(n[0::2]))
    np.testing.assert_array_equal(L[1::2], catalog("power_type", rho=1).log_abs_coeffs(n[1::2]))


def test_abs_and_derivative_sources():
    s = catalog("sin", **{"lambda": 2})
    a = abs_source(s)
    n = np.arange(0, 40)
    np.testing.assert_array_equal(a.log_abs_coeffs(n), s.log_abs_coeffs(n))
    assert all(a.coeff(k).to_complex().real >= 0 for k in n)
    d = derivative_source(catalog("exp"), 3)
    np.testing.assert_allclose(d.log_abs_coeffs(n), catalog("exp").log_abs_coeffs(n), atol=1e-12)
    p = derivative_source(polynomial([1, 2, 3]), 1)
    assert p.coeff(1).to_complex() == pytest.approx(6.0) and p.degree == 1


def test_catalog_listing_and_parse():
    rows = catalog_listing()
    specs = {r["spec"]: r for r in rows}
    assert "sin:lambda" in specs and "|lambda|" in specs["sin:lambda"]["ground_truth"]
    assert specs["maximal_type:rho"]["type_tag"] == "maximal"
    assert parse_source("sin:lambda=2").ground_truth.type == 2.0
    assert parse_source("polynomial:coeffs=1;0;3").degree == 2
    assert parse_complex("3.14159265358979+0i") == complex(3.14159265358979, 0)
    assert parse_complex("1-2j") == 1 - 2j
    with pytest.raises(UnknownId):
        parse_source("nope:x=1")


def test_index_sequences():
    assert IndexSequence.evens().nth_array(1, 4).tolist() == [2, 4, 6, 8]
    assert IndexSequence.odds().nth(1) == 1
    assert IndexSequence.squares().nth_array(1, 4).tolist() == [1, 4, 9, 16]
    assert IndexSequence.primes().nth_array(1, 6).tolist() == [2, 3, 5, 7, 11, 13]
    assert IndexSequence.power(3).nth_array(1, 3).tolist() == [3, 9, 27]
    assert not IndexSequence.power(2).contains(1)
    assert IndexSequence.explicit([1, 4, 9]).contains(4)
    with pytest.raises(BadParam):
        IndexSequence.explicit([3, 2])
    ev = IndexSequence.evens()
    assert ev.k_window(1000, 2000) == (500, 1000)
    assert parse_index_sequence("arith:q=3,r=1").nth_array(1, 3).tolist() == [1, 4, 7]
    assert parse_index_sequence("list:1;4").values == (1, 4)
    assert parse_index_sequence("complement:squares").contains(2)


def test_complement():
    mu = complement(IndexSequence.evens(), 100)
    assert mu.nth_array(1, 5).tolist() == [1, 3, 5, 7, 9]
    assert complement(IndexSequence.squares(), 10).members(1, 10).tolist() == [2, 3, 5, 6, 7, 8, 10]
    for nu in (IndexSequence.evens(), IndexSequence.squares(), IndexSequence.primes(),
               IndexSequence.power(2), IndexSequence.explicit([2, 3, 7])):
        assert complement(complement(nu, 50), 50) == nu
        mu = complement(nu, 500)
        a, b = set(nu.members(1, 500).tolist()), set(mu.members(1, 500).tolist())
        assert not a & b and a | b == set(range(1, 501))
    with pytest.raises(NotProper):
        complement(IndexSequence.naturals(), 100)


def test_subexponential_diagnostic():
    r = subexponential_diagnostic(IndexSequence.evens(), 100)
    assert r.max_tail_ratio <= 1.02 and r.trend == "decreasing" and not r.exponential
    r = subexponential_diagnostic(IndexSequence.power(2), 30)
    assert r.max_tail_ratio == 2.0 and r.exponential
    r = subexponential_diagnostic(IndexSequence.squares(), 100)
    assert r.trend == "decreasing" and r.max_tail_ratio < 1.05
    with pytest.raises(BadParam):
        subexponential_diagnostic(IndexSequence.evens(), 5)
