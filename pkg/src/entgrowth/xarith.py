"""Extended-exponent complex and real scalars.

A value is stored as a double-precision mantissa times ``2**exp2`` with an
unbounded Python integer exponent, so quantities such as ``2**n / n!`` for
``n`` in the tens of thousands stay representable. Normalization is by the
complex magnitude: a nonzero mantissa satisfies ``0.5 <= hypot(re, im) < 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import OverflowDomain

LN2 = math.log(2.0)
MANTISSA_BITS = 53
# exponent gap beyond which the smaller addend is below rounding noise
_SATURATION_GAP = MANTISSA_BITS + 8
# caller contract for leaving log space
ROOT_EXP_LIMIT = 700.0


def _check_finite(*xs):
    for x in xs:
        if not math.isfinite(x):
            raise ValueError(f"non-finite mantissa component {x!r}")


@dataclass(frozen=True, slots=True)
class XComplex:
    """(mantissa_re + i*mantissa_im) * 2**exp2."""

    mantissa_re: float
    mantissa_im: float
    exp2: int

    @staticmethod
    def zero() -> XComplex:
        return _ZERO

    @staticmethod
    def from_complex(z: complex) -> XComplex:
        z = complex(z)
        return normalize(z.real, z.imag, 0)

    @staticmethod
    def from_log(log_abs: float, phase: complex = 1.0) -> XComplex:
        """Build ``exp(log_abs) * phase`` without leaving log space.

        ``phase`` should have unit modulus; ``log_abs = -inf`` gives zero.
        """
        if log_abs == -math.inf or phase == 0:
            return _ZERO
        if not math.isfinite(log_abs):
            raise ValueError("log_abs must be finite or -inf")
        k = math.floor(log_abs / LN2)
        frac = math.exp(log_abs - k * LN2)  # in [1, 2) up to rounding
        phase = complex(phase)
        return normalize(frac * phase.real, frac * phase.imag, k)

    @property
    def is_zero(self) -> bool:
        return self.mantissa_re == 0.0 and self.mantissa_im == 0.0

    def to_complex(self) -> complex:
        """Convert to a hardware complex (may overflow to inf or underflow to 0)."""
        return complex(math.ldexp(self.mantissa_re, self.exp2) if self.mantissa_re else 0.0,
                       math.ldexp(self.mantissa_im, self.exp2) if self.mantissa_im else 0.0)

    def abs(self) -> XReal:
        if self.is_zero:
            return XReal.zero()
        return XReal(math.hypot(self.mantissa_re, self.mantissa_im), self.exp2)

    def phase(self) -> complex:
        """Unit complex number with the argument of the value (0 for zero)."""
        if self.is_zero:
            return 0j
        h = math.hypot(self.mantissa_re, self.mantissa_im)
        return complex(self.mantissa_re / h, self.mantissa_im / h)

    def conj(self) -> XComplex:
        return XComplex(self.mantissa_re, -self.mantissa_im, self.exp2)

    def __neg__(self) -> XComplex:
        if self.is_zero:
            return self
        return XComplex(-self.mantissa_re, -self.mantissa_im, self.exp2)

    def __add__(self, other: XComplex) -> XComplex:
        return xc_add(self, other)

    def __sub__(self, other: XComplex) -> XComplex:
        return xc_add(self, -other)

    def __mul__(self, other: XComplex) -> XComplex:
        return xc_mul(self, other)

    def dumps(self) -> str:
        """Debug serialization ``m_re,m_im,e``."""
        return f"{self.mantissa_re!r},{self.mantissa_im!r},{self.exp2}"

    @staticmethod
    def loads(text: str) -> XComplex:
        re_s, im_s, e_s = text.split(",")
        return normalize(float(re_s), float(im_s), int(e_s))


_ZERO = XComplex(0.0, 0.0, 0)


def normalize(re: float, im: float, exp2: int) -> XComplex:
    """Rescale so that the mantissa magnitude lies in [1/2, 1)."""
    _check_finite(re, im)
    if re == 0.0 and im == 0.0:
        return _ZERO
    h = math.hypot(re, im)
    if math.isinf(h):
        re, im = re / 4.0, im / 4.0
        exp2 += 2
        h = math.hypot(re, im)
    _, e = math.frexp(h)
    re, im = math.ldexp(re, -e), math.ldexp(im, -e)
    # hypot rounding can land exactly on 1.0 for some inputs
    if math.hypot(re, im) >= 1.0:
        re, im = re / 2.0, im / 2.0
        e += 1
    elif math.hypot(re, im) < 0.5:
        re, im = re * 2.0, im * 2.0
        e -= 1
    return XComplex(re + 0.0, im + 0.0, int(exp2) + e)


def xc_add(a: XComplex, b: XComplex) -> XComplex:
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    gap = a.exp2 - b.exp2
    if gap > _SATURATION_GAP:
        return a
    if gap < -_SATURATION_GAP:
        return b
    e = max(a.exp2, b.exp2)
    re = math.ldexp(a.mantissa_re, a.exp2 - e) + math.ldexp(b.mantissa_re, b.exp2 - e)
    im = math.ldexp(a.mantissa_im, a.exp2 - e) + math.ldexp(b.mantissa_im, b.exp2 - e)
    return normalize(re, im, e)


def xc_mul(a: XComplex, b: XComplex) -> XComplex:
    if a.is_zero or b.is_zero:
        return _ZERO
    re = a.mantissa_re * b.mantissa_re - a.mantissa_im * b.mantissa_im
    im = a.mantissa_re * b.mantissa_im + a.mantissa_im * b.mantissa_re
    return normalize(re, im, a.exp2 + b.exp2)


def xc_log_abs(a: XComplex) -> float:
    """Natural log of the modulus; -inf for zero."""
    if a.is_zero:
        return -math.inf
    return math.log(math.hypot(a.mantissa_re, a.mantissa_im)) + a.exp2 * LN2


def xc_root_abs(a: XComplex, p: float) -> float:
    """``|a| ** (1/p)`` as an ordinary float.

    Raises OverflowDomain when ``|log|a| / p| >= 700``; the caller must then
    keep working with logarithms.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if a.is_zero:
        return 0.0
    v = xc_log_abs(a) / p
    if abs(v) >= ROOT_EXP_LIMIT:
        raise OverflowDomain(f"|log|a|/p| = {abs(v):.1f} exceeds {ROOT_EXP_LIMIT}")
    return math.exp(v)


@dataclass(frozen=True, slots=True, order=False)
class XReal:
    """Nonnegative ``mantissa * 2**exp2`` with mantissa in [1/2, 1), or zero.

    ``XReal.inf()`` is a sentinel used for uncertified bounds.
    """

    mantissa: float
    exp2: int

    @staticmethod
    def zero() -> XReal:
        return _RZERO

    @staticmethod
    def inf() -> XReal:
        return _RINF

    @staticmethod
    def from_float(x: float) -> XReal:
        if x < 0:
            raise ValueError("XReal is nonnegative")
        if math.isinf(x):
            return _RINF
        if x == 0:
            return _RZERO
        m, e = math.frexp(x)
        return XReal(m, e)

    @staticmethod
    def from_log(log_abs: float) -> XReal:
        if log_abs == -math.inf:
            return _RZERO
        if log_abs == math.inf:
            return _RINF
        k = math.floor(log_abs / LN2)
        m, e = math.frexp(math.exp(log_abs - k * LN2))
        return XReal(m, k + e)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.mantissa)

    def log(self) -> float:
        if self.is_zero:
            return -math.inf
        if self.is_inf:
            return math.inf
        return math.log(self.mantissa) + self.exp2 * LN2

    def to_float(self) -> float:
        if self.is_inf:
            return math.inf
        try:
            return math.ldexp(self.mantissa, self.exp2)
        except OverflowError:
            return math.inf

    def __add__(self, other: XReal) -> XReal:
        if self.is_inf or other.is_inf:
            return _RINF
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        gap = self.exp2 - other.exp2
        if gap > _SATURATION_GAP:
            return self
        if gap < -_SATURATION_GAP:
            return other
        e = max(self.exp2, other.exp2)
        m, de = math.frexp(math.ldexp(self.mantissa, self.exp2 - e)
                           + math.ldexp(other.mantissa, other.exp2 - e))
        return XReal(m, e + de)

    def __mul__(self, other: XReal) -> XReal:
        if self.is_zero or other.is_zero:
            return _RZERO
        if self.is_inf or other.is_inf:
            return _RINF
        m, de = math.frexp(self.mantissa * other.mantissa)
        return XReal(m, self.exp2 + other.exp2 + de)

    def _key(self):
        if self.is_zero:
            return (0, 0, 0.0)
        if self.is_inf:
            return (2, 0, 0.0)
        return (1, self.exp2, self.mantissa)

    def __lt__(self, other: XReal) -> bool:
        return self._key() < other._key()

    def __le__(self, other: XReal) -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: XReal) -> bool:
        return self._key() > other._key()

    def __ge__(self, other: XReal) -> bool:
        return self._key() >= other._key()


_RZERO = XReal(0.0, 0)
_RINF = XReal(math.inf, 0)


def phase_of(z: complex) -> complex:
    """Unit complex with the argument of ``z``; 0 for ``z == 0``."""
    if z == 0:
        return 0j
    return cmath.exp(1j * cmath.phase(z))
