import math

import numpy as np
import pytest

from entgrowth.coeffs import IndexSequence, catalog
from entgrowth.errors import AllSkipped, RhoOutOfRange
from entgrowth.growth import order_from_coeffs, theta_of_rho, type_from_coeffs
from entgrowth.subseq import (default_k_window, functional_terms, max_identity_check, rho_nu,
                              sigma_nu, tau_nu, theta_nu)

ODDS, EVENS = IndexSequence.odds(), IndexSequence.evens()
NAT = IndexSequence.naturals()


def test_sin2_odds_at_origin():
    src = catalog("sin", **{"lambda": 2})
    kw = default_k_window(ODDS, 2000)
    r = rho_nu(src, ODDS, 0, kw).value
    t = tau_nu(src, ODDS, 0, 1.0, kw).value
    # at z = 0 the odd derivatives are the coefficients times n!
    assert r == pytest.approx(order_from_coeffs(src, (1001, 1999)).value, rel=1e-12)
    assert r == pytest.approx(1.3235, abs=1e-3)
    assert t == pytest.approx(2.0, rel=0.01)
    assert t == pytest.approx(type_from_coeffs(src, 1.0, (1001, 1999)).value, rel=1e-10)


def test_sin2_odds_theta_window_bias():
    # theta_nu on the default window carries the ln-correction bias of the
    # window sup; the bias shrinks as the window moves out
    src = catalog("sin", **{"lambda": 2})
    vals = [theta_nu(src, ODDS, 0, default_k_window(ODDS, N)).value for N in (500, 1000, 2000)]
    assert vals == sorted(vals, reverse=True)
    assert vals[-1] == pytest.approx(1.1055, abs=1e-3)
    # oracle: |g^(n)(0)|^(1/(n ln n)) = (2^n)^(1/(n ln n)) on odd n
    oracle = max(math.exp(math.log(2.0) / math.log(n)) for n in range(1001, 2000, 2))
    assert vals[-1] == pytest.approx(oracle, rel=1e-12)


def test_sin_at_one_theta_from_below():
    src = catalog("sin")
    for nu in (EVENS, ODDS):
        est = theta_nu(src, nu, 1.0, default_k_window(nu, 2000))
        assert 0.99 < est.value < 1.0


def test_sin_even_derivatives_vanish_at_lattice():
    src = catalog("sin", **{"lambda": 2})
    kw = default_k_window(EVENS, 400)
    for z in (0, math.pi / 2, math.pi, -3 * math.pi / 2):
        est = theta_nu(src, EVENS, z, kw)
        assert est.value == 0.0 and est.exact_zeros == kw[1] - kw[0] + 1
        with pytest.raises(AllSkipped):
            rho_nu(src, EVENS, z, kw)
    est = theta_nu(src, EVENS, 0.5, kw)
    assert est.exact_zeros == 0 and est.value > 0.9


def test_exp_functionals_anywhere():
    src = catalog("exp")
    kw = default_k_window(IndexSequence.primes(), 2000)
    for z in (0j, 1 - 2j, -3 + 0j):
        assert tau_nu(src, IndexSequence.primes(), z, 1.0, kw).value == pytest.approx(1.0, rel=0.01)
        # |e^z|^(1/(n ln n)) = exp(Re z / (n ln n)) with n >= 1000
        theta = theta_nu(src, IndexSequence.primes(), z, kw).value
        assert abs(math.log(theta)) <= abs(z.real) / (1000 * math.log(1000))


def test_functional_terms_oracle():
    src = catalog("exp")
    ns, terms, codes = functional_terms(src, np.array([1, 2, 10, 100]), 0.5, "theta")
    # n < 2 skipped; |e^0.5|^(1/(n ln n))
    assert codes[0] == 2 and ns[1] == 2
    assert terms[2] == pytest.approx(math.exp(0.5 / (10 * math.log(10))), rel=1e-14)
    ns, terms, codes = functional_terms(src, np.array([5, 50]), 0, "sigma", rho=1.0)
    assert terms == pytest.approx([1.0, 1.0])


def test_rho_required_for_tau_sigma():
    with pytest.raises(RhoOutOfRange):
        tau_nu(catalog("exp"), NAT, 0, 0.0, (10, 20))
    with pytest.raises(RhoOutOfRange):
        sigma_nu(catalog("exp"), NAT, 0, math.inf, 100)


def test_theta_bounds():
    for src, rho in ((catalog("exp"), 1.0), (catalog("power_type", rho=2), 2.0)):
        vals = [theta_nu(src, EVENS, 0.3 + 0.4j, default_k_window(EVENS, N)).value for N in (500, 2000)]
        assert all(0 < v < math.e for v in vals)
    # finite windows approach theta(2) from below, slowly
    assert vals[0] < vals[1] < theta_of_rho(2.0).theta


def test_window_monotone_in_k():
    src = catalog("cos", **{"lambda": 1.5})
    small = tau_nu(src, EVENS, 0.2, 1.0, (400, 600)).value
    large = tau_nu(src, EVENS, 0.2, 1.0, (400, 900)).value
    assert large >= small


def test_sigma_exp_curve():
    c = sigma_nu(catalog("exp"), NAT, 0, 1.0, 2000)
    assert c.at(2000) == 1.0 and c.at(10) == 1.0
    assert np.all(np.diff(c.running_sup[c.running_sup > 0]) >= 0)


def test_sigma_maximal_type_grows_like_log():
    c = sigma_nu(catalog("maximal_type", rho=1), NAT, 0, 1.0, 2000)
    ratio = c.at(2000) / c.at(200)
    assert ratio > 1.3
    assert ratio == pytest.approx(math.log(2000) / math.log(200), rel=0.03)
    assert c.last_improved_k > 1900


def test_max_identity_sin2():
    rep = max_identity_check(catalog("sin", **{"lambda": 2}), ODDS, 0.5, 1.0, 2000)
    assert rep.rho_ok and rep.tau_ok
    assert rep.rho_full == max(rep.rho_nu, rep.rho_mu)


def test_max_identity_parity_at_origin():
    # even coefficients of sin vanish: the odd part alone realizes the full value
    rep = max_identity_check(catalog("sin", **{"lambda": 2}), ODDS, 0, 1.0, 2000)
    assert rep.rho_mu is None and rep.rho_ok and rep.rho_full == rep.rho_nu
    d = rep.to_dict()
    assert d["rho_mu"] is None


def test_max_identity_without_rho():
    rep = max_identity_check(catalog("exp"), IndexSequence.squares(), 1.0, None, 1000)
    assert rep.rho_ok and rep.tau_ok is None


def test_estimate_to_dict():
    est = rho_nu(catalog("exp"), EVENS, 0, (10, 20))
    d = est.to_dict()
    assert d["functional"] == "rho" and d["k_window"] == [10, 20]
    assert d["z"] == [0.0, 0.0]
