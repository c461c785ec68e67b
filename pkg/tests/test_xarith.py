import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entgrowth.errors import OverflowDomain
from entgrowth.xarith import (LN2, XComplex, XReal, normalize, xc_add, xc_log_abs, xc_mul,
                              xc_root_abs)


def dyadic(m: float, e: int) -> XComplex:
    return normalize(m, 0.0, e)


def exact(x: XComplex):
    """Exact rational real/imag parts of an XComplex."""
    scale = Fraction(2) ** x.exp2
    return Fraction(x.mantissa_re) * scale, Fraction(x.mantissa_im) * scale


def test_add_dyadic():
    s = xc_add(dyadic(1.0, 0), dyadic(1.0, 0))
    assert (s.mantissa_re, s.mantissa_im, s.exp2) == (0.5, 0.0, 2)


def test_add_zero_identity():
    x = XComplex.from_complex(3.5 - 1.25j)
    assert xc_add(x, XComplex.zero()) == x
    assert xc_add(XComplex.zero(), x) == x


def test_add_far_apart_saturates():
    big, tiny = dyadic(1.0, 600), dyadic(1.0, -600)
    assert xc_add(big, tiny) == big
    assert xc_add(tiny, big) == big


def test_mul_examples():
    p = xc_mul(dyadic(1.0, 1000), dyadic(1.0, 1000))
    assert xc_log_abs(p) == pytest.approx(2000 * LN2, rel=1e-15)
    x = XComplex.from_complex(0.3 + 0.7j)
    assert xc_mul(x, XComplex.from_complex(1)) == x
    assert xc_mul(XComplex.from_complex(1 + 1j), XComplex.from_complex(1 - 1j)).to_complex() == 2


def test_mul_large_exponents():
    a = normalize(0.75, 0.0, 2 ** 40)
    assert xc_mul(a, a).exp2 == 2 ** 41


def test_log_abs():
    assert xc_log_abs(XComplex.zero()) == -math.inf
    assert xc_log_abs(XComplex.from_complex(1)) == 0.0
    for k in (-5000, -1, 3, 12345):
        assert xc_log_abs(dyadic(1.0, k)) == pytest.approx(k * LN2, rel=1e-12)


def test_root_abs():
    a = XComplex.from_log(-100.0)
    assert xc_root_abs(a, 100) == pytest.approx(math.exp(-1), rel=1e-14)
    assert xc_root_abs(XComplex.zero(), 3.0) == 0.0


def test_root_abs_contract():
    # log|a| / p = -5000 ln 2 / 10 ~ -346.6 keeps the contract; p = 1 breaks it
    a = dyadic(1.0, -5000)
    assert xc_root_abs(a, 10) == pytest.approx(2.0 ** -500, rel=1e-12)
    with pytest.raises(OverflowDomain):
        xc_root_abs(a, 1)
    with pytest.raises(OverflowDomain):
        xc_root_abs(dyadic(1.0, 20000), 10)


def test_from_log_zero_and_phase():
    assert XComplex.from_log(-math.inf).is_zero
    x = XComplex.from_log(math.log(2.0), 1j)
    assert x.to_complex() == pytest.approx(2j)


def test_serialization_roundtrip():
    x = XComplex.from_log(-12345.678, complex(0.6, -0.8))
    assert XComplex.loads(x.dumps()) == x
    assert XComplex.zero().dumps() == "0.0,0.0,0"


def test_xreal_basics():
    a, b = XReal.from_float(3.0), XReal.from_log(-4000.0)
    assert (a + b).to_float() == 3.0
    assert (a * XReal.from_float(2.0)).to_float() == 6.0
    assert b < a and a > b and XReal.zero() < b < XReal.inf()
    assert XReal.from_log(-4000.0).log() == pytest.approx(-4000.0, rel=1e-15)
    assert XReal.inf().is_inf and (XReal.inf() + a).is_inf


mantissas = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False).filter(lambda v: abs(v) > 1e-3)
exponents = st.integers(min_value=-3000, max_value=3000)


@st.composite
def xcomplex(draw):
    return normalize(draw(mantissas), draw(mantissas), draw(exponents))


@given(xcomplex())
def test_normalized_invariant(x):
    h = math.hypot(x.mantissa_re, x.mantissa_im)
    assert 0.5 <= h < 1.0
    assert normalize(x.mantissa_re, x.mantissa_im, x.exp2) == x


@given(xcomplex(), xcomplex())
@settings(max_examples=200)
def test_add_matches_rationals(a, b):
    s = xc_add(a, b)
    ar, ai = exact(a)
    br, bi = exact(b)
    er, ei = ar + br, ai + bi
    sr, si = exact(s)
    big = max(abs(ar) + abs(ai), abs(br) + abs(bi))
    # error relative to the operand scale: 2 ulps of the mantissa, or the
    # saturated operand when the gap exceeds the mantissa width
    gap = abs(a.exp2 - b.exp2)
    tol = big * Fraction(2) ** (-51) if gap <= 61 else big * Fraction(2) ** (-60)
    assert abs(sr - er) <= tol and abs(si - ei) <= tol


@given(xcomplex(), xcomplex())
@settings(max_examples=200)
def test_mul_log_additive(a, b):
    assert xc_log_abs(xc_mul(a, b)) == pytest.approx(xc_log_abs(a) + xc_log_abs(b), abs=1e-10)


@given(xcomplex(), xcomplex())
@settings(max_examples=200)
def test_mul_matches_rationals(a, b):
    p = xc_mul(a, b)
    ar, ai = exact(a)
    br, bi = exact(b)
    er, ei = ar * br - ai * bi, ar * bi + ai * br
    pr, pi = exact(p)
    scale = (abs(ar) + abs(ai)) * (abs(br) + abs(bi))
    assert abs(pr - er) <= scale * Fraction(2) ** -51
    assert abs(pi - ei) <= scale * Fraction(2) ** -51
