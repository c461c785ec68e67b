"""Entire functions as coefficient sources, and index sequences.

A :class:`CoefficientSource` is driven by a vectorized kernel
``ns -> (log|a_n|, phase(a_n))``; exact zeros carry ``log = -inf`` and
phase 0. Sources built from closed forms may also carry an exact
derivative kernel ``(z, ns) -> (log|g^(n)(z)|, phase, status)``.
"""

from __future__ import annotations

import bisect
import cmath
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from .errors import BadParam, NotProper, UnknownId, ZeroAmbiguous
from .xarith import XComplex

# derivative status codes
OK = 0
EXACT_ZERO = 1
AMBIGUOUS = 2
UNCERTIFIED = 3

# tolerance for deciding that lambda*z/pi is an integer (inputs are floats,
# so pi itself is never exact)
ZERO_SNAP = 1e-12
# relative size below which a two-term oracle sum is treated as cancelled
_CANCEL = 1e-12

Kernel = Callable[[np.ndarray], tuple]
DerivativeKernel = Callable[[complex, np.ndarray], tuple]


def log_factorial(n):
    """ln(n!) via log-gamma, elementwise for arrays."""
    return gammaln(np.asarray(n, dtype=np.float64) + 1.0)


def _as_index_array(ns) -> np.ndarray:
    ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
    if ns.size and ns.min() < 0:
        raise ValueError("coefficient indices must be nonnegative")
    return ns


@dataclass(frozen=True)
class GroundTruth:
    """Known order and, when 0 < order < inf, type.

    ``type_tag`` is one of ``"minimal"``, ``"finite"``, ``"maximal"`` or
    ``None`` (type undefined).
    """

    order: float
    type_tag: Optional[str] = None
    type_value: Optional[float] = None

    def __post_init__(self):
        if not self.order >= 0:
            raise BadParam("order must be nonnegative")
        defined = 0 < self.order < math.inf
        if self.type_tag is not None and not defined:
            raise BadParam("type is only defined for 0 < order < inf")
        if self.type_tag not in (None, "minimal", "finite", "maximal"):
            raise BadParam(f"unknown type tag {self.type_tag!r}")
        if self.type_tag == "finite" and (self.type_value is None or not 0 <= self.type_value < math.inf):
            raise BadParam("finite type needs a finite value")

    @classmethod
    def finite(cls, order, tau):
        return cls(order, "finite", float(tau))

    @property
    def type(self) -> Optional[float]:
        """Numeric type: 0 for minimal, inf for maximal, None if undefined."""
        if self.type_tag is None:
            return None
        return {"minimal": 0.0, "maximal": math.inf}.get(self.type_tag, self.type_value)

    def describe(self) -> str:
        if self.type_tag is None:
            return f"order {self.order:g}, type undefined"
        if self.type_tag == "finite":
            return f"order {self.order:g}, type {self.type_value:g}"
        return f"order {self.order:g}, {self.type_tag} type"

    def to_dict(self) -> dict:
        return {"order": self.order, "type_tag": self.type_tag, "type_value": self.type_value}


@dataclass(frozen=True, eq=False)
class CoefficientSource:
    """An entire function presented through its Taylor coefficients at 0.

    Instances hash by identity, which lets numeric caches key on them.
    """

    id: str
    kernel: Kernel
    derivative_kernel: Optional[DerivativeKernel] = None
    ground_truth: Optional[GroundTruth] = None
    degree: Optional[int] = None
    params: dict = field(default_factory=dict)

    def coeffs_array(self, ns):
        ns = _as_index_array(ns)
        L, P = self.kernel(ns)
        return np.asarray(L, dtype=np.float64), np.asarray(P, dtype=np.complex128)

    def log_abs_coeffs(self, ns) -> np.ndarray:
        return self.coeffs_array(ns)[0]

    def log_abs_coeff(self, n: int) -> float:
        return float(self.log_abs_coeffs([n])[0])

    def coeff(self, n: int) -> XComplex:
        L, P = self.coeffs_array([n])
        return XComplex.from_log(float(L[0]), complex(P[0]))

    @property
    def has_derivative_exact(self) -> bool:
        return self.derivative_kernel is not None

    def derivative_log_abs_exact(self, z: complex, ns):
        """``(log|g^(n)(z)|, status)`` from the closed form, for each n."""
        if self.derivative_kernel is None:
            raise AttributeError(f"source {self.id!r} has no exact derivative")
        L, _, S = self.derivative_kernel(complex(z), _as_index_array(ns))
        return np.asarray(L, dtype=np.float64), np.asarray(S, dtype=np.int8)

    def derivative_exact(self, z: complex, n: int) -> XComplex:
        if self.derivative_kernel is None:
            raise AttributeError(f"source {self.id!r} has no exact derivative")
        L, P, S = self.derivative_kernel(complex(z), _as_index_array([n]))
        if S[0] == AMBIGUOUS:
            raise ZeroAmbiguous(f"{self.id}: g^({n})({z}) cancels below oracle precision")
        return XComplex.from_log(float(L[0]), complex(P[0]))

    def entirety_diagnostic(self, n_max: int = 2000) -> float:
        """Return ``log|a_n|/n`` at the largest nonzero index <= n_max.

        Strongly negative values indicate the coefficients decay faster
        than any geometric rate, as they must for an entire function.
        """
        ns = np.arange(1, n_max + 1)
        L = self.log_abs_coeffs(ns)
        nz = np.flatnonzero(np.isfinite(L))
        if not nz.size:
            return -math.inf
        i = nz[-1]
        return float(L[i] / ns[i])

    def __repr__(self):
        return f"CoefficientSource({self.id!r})"


# ---------------------------------------------------------------------------
# closed-form helpers

def _snap_integer(x: complex) -> bool:
    k = round(x.real)
    scale = max(1.0, abs(x))
    return abs(x.real - k) <= ZERO_SNAP * scale and abs(x.imag) <= ZERO_SNAP * scale


def _log_trig(w: complex, kind: str):
    """(log|T(w)|, phase, is_zero) for T = sin or cos, overflow-safe."""
    if kind == "sin":
        is_zero = _snap_integer(w / math.pi)
    else:
        is_zero = _snap_integer(w / math.pi - 0.5)
    if is_zero:
        return -math.inf, 0j, True
    x, y = w.real, w.imag
    if abs(y) < 300:
        v = cmath.sin(w) if kind == "sin" else cmath.cos(w)
        if v == 0:
            return -math.inf, 0j, True
        return math.log(abs(v)), v / abs(v), False
    # one exponential dominates; the other is below 2**-800 relative
    if kind == "sin":
        ph = 1j * cmath.exp(-1j * x) if y > 0 else -1j * cmath.exp(1j * x)
    else:
        ph = cmath.exp(-1j * x) if y > 0 else cmath.exp(1j * x)
    return abs(y) - math.log(2.0), ph, False


def _trig_shift_table(w: complex, kind: str):
    """T(w + n*pi/2) for n mod 4, as (log, phase, zero) triples."""
    ls, ps, zs = _log_trig(w, "sin")
    lc, pc, zc = _log_trig(w, "cos")
    if kind == "sin":
        return [(ls, ps, zs), (lc, pc, zc), (ls, -ps, zs), (lc, -pc, zc)]
    return [(lc, pc, zc), (ls, -ps, zs), (lc, -pc, zc), (ls, ps, zs)]


def _lambda_power_phase(lam: complex, ns: np.ndarray) -> np.ndarray:
    arg = cmath.phase(lam)
    if arg == 0.0:
        return np.ones(ns.shape, dtype=np.complex128)
    return np.exp(1j * arg * ns.astype(np.float64))


def _trig_source(kind: str, lam: complex) -> CoefficientSource:
    lam = complex(lam)
    if lam == 0:
        raise BadParam("lambda must be nonzero")
    log_lam = math.log(abs(lam))
    parity = 1 if kind == "sin" else 0

    def kernel(ns):
        L = np.full(ns.shape, -np.inf)
        P = np.zeros(ns.shape, dtype=np.complex128)
        on = (ns % 2) == parity
        n_on = ns[on]
        L[on] = n_on * log_lam - log_factorial(n_on)
        sign = np.where(((n_on - parity) // 2) % 2 == 0, 1.0, -1.0)
        P[on] = sign * _lambda_power_phase(lam, n_on)
        return L, P

    def dkernel(z, ns):
        table = _trig_shift_table(lam * z, kind)
        r = ns % 4
        tl = np.array([t[0] for t in table])
        tp = np.array([t[1] for t in table], dtype=np.complex128)
        tz = np.array([t[2] for t in table])
        L = np.where(tz[r], -np.inf, ns * log_lam + tl[r])
        P = np.where(tz[r], 0j, _lambda_power_phase(lam, ns) * tp[r])
        S = np.where(tz[r], EXACT_ZERO, OK).astype(np.int8)
        return L, P, S

    lam_txt = f"{lam.real:g}" if lam.imag == 0 else f"{lam}"
    return CoefficientSource(
        id=f"{kind}:lambda={lam_txt}",
        kernel=kernel,
        derivative_kernel=dkernel,
        ground_truth=GroundTruth.finite(1.0, abs(lam)),
        params={"lambda": lam},
    )


def _exp_source() -> CoefficientSource:
    def kernel(ns):
        return -log_factorial(ns), np.ones(ns.shape, dtype=np.complex128)

    def dkernel(z, ns):
        L = np.full(ns.shape, z.real)
        P = np.full(ns.shape, cmath.exp(1j * z.imag), dtype=np.complex128)
        return L, P, np.zeros(ns.shape, dtype=np.int8)

    return CoefficientSource("exp", kernel, dkernel, GroundTruth.finite(1.0, 1.0))


def _exp_zk_source(k: int) -> CoefficientSource:
    if k < 1 or int(k) != k:
        raise BadParam("exp_zk needs an integer k >= 1")
    k = int(k)

    def kernel(ns):
        L = np.full(ns.shape, -np.inf)
        on = ns % k == 0
        L[on] = -log_factorial(ns[on] // k)
        return L, np.where(on, 1.0 + 0j, 0j)

    return CoefficientSource(f"exp_zk:k={k}", kernel, None,
                             GroundTruth.finite(float(k), 1.0), params={"k": k})


def _mittag_leffler_source(alpha: float) -> CoefficientSource:
    if not alpha > 0:
        raise BadParam("mittag_leffler needs alpha > 0")

    def kernel(ns):
        return -gammaln(alpha * ns + 1.0), np.ones(ns.shape, dtype=np.complex128)

    return CoefficientSource(f"mittag_leffler:alpha={alpha:g}", kernel, None,
                             GroundTruth.finite(1.0 / alpha, 1.0), params={"alpha": alpha})


def _designer_source(name: str, rho: float) -> CoefficientSource:
    """power/minimal/maximal-type designer coefficients of order rho."""
    if not 0 < rho < math.inf:
        raise BadParam(f"{name} needs 0 < rho < inf")
    first = {"power_type": 1, "minimal_type": 2, "maximal_type": 3}[name]

    def kernel(ns):
        L = np.full(ns.shape, -np.inf)
        L[ns == 0] = 0.0
        on = ns >= first
        n = ns[on].astype(np.float64)
        if name == "power_type":
            L[on] = -(n / rho) * np.log(n)
        elif name == "minimal_type":
            L[on] = -(n / rho) * np.log(n * np.log(n))
        else:
            L[on] = -(n / rho) * np.log(n / np.log(n))
        return L, np.where(np.isfinite(L), 1.0 + 0j, 0j)

    truth = {
        "power_type": GroundTruth.finite(rho, 1.0 / (math.e * rho)),
        "minimal_type": GroundTruth(rho, "minimal"),
        "maximal_type": GroundTruth(rho, "maximal"),
    }[name]
    return CoefficientSource(f"{name}:rho={rho:g}", kernel, None, truth, params={"rho": rho})


def polynomial(coeffs) -> CoefficientSource:
    c = [complex(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    arr = np.array(c, dtype=np.complex128)
    deg = len(c) - 1

    def kernel(ns):
        L = np.full(ns.shape, -np.inf)
        P = np.zeros(ns.shape, dtype=np.complex128)
        inside = ns <= deg
        vals = arr[ns[inside]] if deg >= 0 else np.zeros(0, dtype=np.complex128)
        mag = np.abs(vals)
        with np.errstate(divide="ignore", invalid="ignore"):
            L[inside] = np.log(mag)
            P[inside] = np.where(mag > 0, vals / np.where(mag > 0, mag, 1.0), 0j)
        return L, P

    txt = ";".join(f"{x.real:g}" if x.imag == 0 else str(x) for x in c)
    return CoefficientSource(f"polynomial:coeffs={txt}", kernel, None, GroundTruth(0.0),
                             degree=deg, params={"coeffs": c})


def zero_source() -> CoefficientSource:
    return polynomial([])


def _combine(La, Pa, Lb, Pb):
    """Elementwise log-space sum of two coefficient/derivative arrays."""
    s = np.maximum(La, Lb)
    fin = np.isfinite(s)
    s_safe = np.where(fin, s, 0.0)
    with np.errstate(invalid="ignore"):
        v = (np.where(np.isfinite(La), Pa * np.exp(La - s_safe), 0j)
             + np.where(np.isfinite(Lb), Pb * np.exp(Lb - s_safe), 0j))
    mag = np.abs(v)
    with np.errstate(divide="ignore"):
        L = np.where(mag > 0, s_safe + np.log(np.where(mag > 0, mag, 1.0)), -np.inf)
    P = np.where(mag > 0, v / np.where(mag > 0, mag, 1.0), 0j)
    return L, P, mag


def source_sum(a: CoefficientSource, b: CoefficientSource, id: Optional[str] = None,
               ground_truth: Optional[GroundTruth] = None) -> CoefficientSource:
    """Coefficientwise sum; the exact derivative survives only if both have one."""

    def kernel(ns):
        La, Pa = a.coeffs_array(ns)
        Lb, Pb = b.coeffs_array(ns)
        L, P, _ = _combine(La, Pa, Lb, Pb)
        return L, P

    dkernel = None
    if a.has_derivative_exact and b.has_derivative_exact:
        def dkernel(z, ns):
            La, Pa, Sa = a.derivative_kernel(z, ns)
            Lb, Pb, Sb = b.derivative_kernel(z, ns)
            L, P, mag = _combine(La, Pa, Lb, Pb)
            S = np.full(ns.shape, OK, dtype=np.int8)
            both = (Sa == EXACT_ZERO) & (Sb == EXACT_ZERO)
            S[both] = EXACT_ZERO
            mixed = (Sa == OK) & (Sb == OK) & (mag <= _CANCEL)
            S[mixed | (Sa == AMBIGUOUS) | (Sb == AMBIGUOUS)] = AMBIGUOUS
            L = np.where(S == OK, L, -np.inf)
            P = np.where(S == OK, P, 0j)
            return L, P, S

    deg = None
    if a.degree is not None and b.degree is not None:
        deg = max(a.degree, b.degree)
    return CoefficientSource(id or f"({a.id})+({b.id})", kernel, dkernel, ground_truth, deg)


def parity_mask(src: CoefficientSource, parity: int) -> CoefficientSource:
    """Keep only the coefficients with ``n % 2 == parity``."""
    parity = int(parity) % 2

    def kernel(ns):
        L, P = src.coeffs_array(ns)
        keep = ns % 2 == parity
        return np.where(keep, L, -np.inf), np.where(keep, P, 0j)

    return CoefficientSource(f"{src.id}[n%2=={parity}]", kernel, None, None, src.degree)


def abs_source(src: CoefficientSource) -> CoefficientSource:
    """The sharp transform: coefficients |a_n|."""

    def kernel(ns):
        L, P = src.coeffs_array(ns)
        return L, np.where(P != 0, 1.0 + 0j, 0j)

    return CoefficientSource(f"sharp({src.id})", kernel, None, src.ground_truth, src.degree)


def derivative_source(src: CoefficientSource, n: int) -> CoefficientSource:
    """The n-th derivative g^(n) as a source: b_m = (n+m)!/m! * a_{n+m}."""
    n = int(n)
    if n < 0:
        raise BadParam("derivative order must be >= 0")

    def kernel(ms):
        L, P = src.coeffs_array(ms + n)
        return log_factorial(ms + n) - log_factorial(ms) + L, P

    dkernel = None
    if src.has_derivative_exact:
        def dkernel(z, ms):
            return src.derivative_kernel(z, ms + n)

    deg = None if src.degree is None else src.degree - n
    truth = src.ground_truth if src.degree is None else GroundTruth(0.0)
    return CoefficientSource(f"D{n}({src.id})", kernel, dkernel, truth, deg)


def from_log_formula(id: str, log_abs: Callable[[np.ndarray], np.ndarray],
                     ground_truth: Optional[GroundTruth] = None) -> CoefficientSource:
    """Source with positive coefficients ``exp(log_abs(n))``."""

    def kernel(ns):
        L = np.asarray(log_abs(ns), dtype=np.float64)
        return L, np.where(np.isfinite(L), 1.0 + 0j, 0j)

    return CoefficientSource(id, kernel, None, ground_truth)


# ---------------------------------------------------------------------------
# catalog

_CATALOG_INFO = [
    ("exp", "", "order 1, type 1"),
    ("sin", "lambda", "order 1, type |lambda|"),
    ("cos", "lambda", "order 1, type |lambda|"),
    ("exp_zk", "k", "order k, type 1"),
    ("mittag_leffler", "alpha", "order 1/alpha, type 1"),
    ("power_type", "rho", "order rho, type 1/(e*rho)"),
    ("minimal_type", "rho", "order rho, minimal type"),
    ("maximal_type", "rho", "order rho, maximal type"),
    ("polynomial", "coeffs", "order 0, type undefined"),
    ("sin_plus_cos2", "", "order 1, type 2"),
]


def catalog_listing() -> list:
    out = []
    for name, param, truth in _CATALOG_INFO:
        out.append({
            "id": name,
            "spec": f"{name}:{param}" if param else name,
            "params": [param] if param else [],
            "ground_truth": truth,
            "type_tag": ("maximal" if "maximal" in truth else "minimal" if "minimal" in truth
                         else None if "undefined" in truth else "finite"),
            "derivative_exact": name in ("exp", "sin", "cos", "sin_plus_cos2"),
        })
    return out


def _need(params, key, conv=float):
    if key not in params:
        raise BadParam(f"missing parameter {key!r}")
    try:
        return conv(params[key])
    except (TypeError, ValueError) as exc:
        raise BadParam(f"bad value for {key!r}: {params[key]!r}") from exc


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise BadParam(f"cannot parse complex number {text!r}") from exc


def catalog(id: str, **params) -> CoefficientSource:
    """Build a catalog source by id; parameters by keyword."""
    if id == "exp":
        return _exp_source()
    if id in ("sin", "cos"):
        lam = params.get("lambda", params.get("lam", 1.0))
        return _trig_source(id, parse_complex(lam))
    if id == "exp_zk":
        return _exp_zk_source(_need(params, "k", lambda v: int(float(v))))
    if id == "mittag_leffler":
        return _mittag_leffler_source(_need(params, "alpha"))
    if id in ("power_type", "minimal_type", "maximal_type"):
        return _designer_source(id, _need(params, "rho"))
    if id == "polynomial":
        coeffs = params.get("coeffs", [])
        if isinstance(coeffs, str):
            coeffs = [parse_complex(c) for c in coeffs.split(";") if c.strip()]
        return polynomial(coeffs)
    if id == "sin_plus_cos2":
        return source_sum(_trig_source("sin", 1.0), _trig_source("cos", 2.0),
                          id="sin_plus_cos2", ground_truth=GroundTruth.finite(1.0, 2.0))
    raise UnknownId(id)


def parse_source(spec: str) -> CoefficientSource:
    """Parse ``"name"`` or ``"name:key=value,key=value"``."""
    name, _, rest = spec.strip().partition(":")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise BadParam(f"expected key=value in {spec!r}")
        params[key.strip()] = value.strip()
    return catalog(name, **params)


# ---------------------------------------------------------------------------
# index sequences

_prime_lock = threading.Lock()
_primes = [2, 3, 5, 7, 11, 13]


def _primes_upto(n: int) -> list:
    global _primes
    with _prime_lock:
        if _primes[-1] < n:
            limit = max(n, 2 * _primes[-1])
            sieve = np.ones(limit + 1, dtype=bool)
            sieve[:2] = False
            for p in range(2, math.isqrt(limit) + 1):
                if sieve[p]:
                    sieve[p * p::p] = False
            _primes = np.flatnonzero(sieve).tolist()
        return _primes


@dataclass(frozen=True)
class IndexSequence:
    """A strictly increasing sequence of positive integers.

    kinds: ``all``, ``arithmetic`` (q, r), ``squares``, ``primes``,
    ``power`` (b), ``explicit`` (values), ``complement`` (base).
    """

    kind: str
    q: int = 1
    r: int = 0
    b: int = 2
    values: tuple = ()
    base: Optional[IndexSequence] = None

    # constructors
    @classmethod
    def naturals(cls):
        return cls("all")

    @classmethod
    def arithmetic(cls, q: int, r: int = 0):
        if q < 1:
            raise BadParam("q must be >= 1")
        if q == 1:
            return cls("all")
        return cls("arithmetic", q=int(q), r=int(r) % int(q))

    @classmethod
    def evens(cls):
        return cls.arithmetic(2, 0)

    @classmethod
    def odds(cls):
        return cls.arithmetic(2, 1)

    @classmethod
    def squares(cls):
        return cls("squares")

    @classmethod
    def primes(cls):
        return cls("primes")

    @classmethod
    def power(cls, b: int):
        if b < 2:
            raise BadParam("power base must be >= 2")
        return cls("power", b=int(b))

    @classmethod
    def explicit(cls, values):
        vals = tuple(int(v) for v in values)
        if any(v < 1 for v in vals) or any(x >= y for x, y in zip(vals, vals[1:])):
            raise BadParam("explicit index list must be strictly increasing positive integers")
        return cls("explicit", values=vals)

    # queries
    @property
    def label(self) -> str:
        if self.kind == "arithmetic":
            if self.q == 2:
                return "even" if self.r == 0 else "odd"
            return f"arith:q={self.q},r={self.r}"
        if self.kind == "power":
            return f"power:b={self.b}"
        if self.kind == "explicit":
            return "list:" + ";".join(map(str, self.values))
        if self.kind == "complement":
            return f"complement:{self.base.label}"
        return self.kind

    @property
    def is_finite(self) -> bool:
        return self.kind == "explicit"

    def contains(self, n: int) -> bool:
        n = int(n)
        if n < 1:
            return False
        k = self.kind
        if k == "all":
            return True
        if k == "arithmetic":
            return n % self.q == self.r
        if k == "squares":
            return math.isqrt(n) ** 2 == n
        if k == "primes":
            ps = _primes_upto(n)
            i = bisect.bisect_left(ps, n)
            return i < len(ps) and ps[i] == n
        if k == "power":
            if n < self.b:
                return False
            while n % self.b == 0:
                n //= self.b
            return n == 1
        if k == "explicit":
            i = bisect.bisect_left(self.values, n)
            return i < len(self.values) and self.values[i] == n
        return not self.base.contains(n)

    def count_upto(self, n: int) -> int:
        """Number of members <= n."""
        n = int(n)
        if n < 1:
            return 0
        k = self.kind
        if k == "all":
            return n
        if k == "arithmetic":
            first = self.r if self.r >= 1 else self.q
            return 0 if n < first else (n - first) // self.q + 1
        if k == "squares":
            return math.isqrt(n)
        if k == "primes":
            return bisect.bisect_right(_primes_upto(n), n)
        if k == "power":
            c, p = 0, self.b
            while p <= n:
                c += 1
                p *= self.b
            return c
        if k == "explicit":
            return bisect.bisect_right(self.values, n)
        return n - self.base.count_upto(n)

    def members(self, lo: int, hi: int) -> np.ndarray:
        """Members in [lo, hi] as an int64 array."""
        lo, hi = max(int(lo), 1), int(hi)
        if hi < lo:
            return np.zeros(0, dtype=np.int64)
        k = self.kind
        if k == "all":
            return np.arange(lo, hi + 1, dtype=np.int64)
        if k == "arithmetic":
            start = lo + ((self.r - lo) % self.q)
            return np.arange(start, hi + 1, self.q, dtype=np.int64)
        if k == "squares":
            a = math.isqrt(lo - 1) + 1
            b = math.isqrt(hi)
            return np.arange(a, b + 1, dtype=np.int64) ** 2
        if k == "primes":
            ps = _primes_upto(hi)
            return np.array(ps[bisect.bisect_left(ps, lo):bisect.bisect_right(ps, hi)], dtype=np.int64)
        if k == "power":
            out, p = [], self.b
            while p <= hi:
                if p >= lo:
                    out.append(p)
                p *= self.b
            return np.array(out, dtype=np.int64)
        if k == "explicit":
            v = self.values
            return np.array(v[bisect.bisect_left(v, lo):bisect.bisect_right(v, hi)], dtype=np.int64)
        return np.setdiff1d(np.arange(lo, hi + 1, dtype=np.int64), self.base.members(lo, hi))

    def nth(self, k: int) -> int:
        """The k-th member, k >= 1."""
        return int(self.nth_array(k, k)[0])

    def nth_array(self, k_min: int, k_max: int) -> np.ndarray:
        """Members n_k for k in [k_min, k_max]."""
        k_min, k_max = int(k_min), int(k_max)
        if k_min < 1:
            raise BadParam("k starts at 1")
        if k_max < k_min:
            return np.zeros(0, dtype=np.int64)
        ks = np.arange(k_min, k_max + 1, dtype=np.int64)
        kind = self.kind
        if kind == "all":
            return ks
        if kind == "arithmetic":
            first = self.r if self.r >= 1 else self.q
            return first + (ks - 1) * self.q
        if kind == "squares":
            return ks * ks
        if kind == "power":
            return np.array([self.b ** int(k) for k in ks], dtype=np.int64)
        if kind == "explicit":
            if k_max > len(self.values):
                raise IndexError(f"explicit sequence has only {len(self.values)} members")
            return np.array(self.values[k_min - 1:k_max], dtype=np.int64)
        hi = max(16, 2 * k_max)
        while self.count_upto(hi) < k_max:
            hi *= 2
        return self.members(1, hi)[k_min - 1:k_max]

    def k_window(self, n_lo: int, n_hi: int) -> tuple:
        """(k_min, k_max) such that n_k ranges over the members in [n_lo, n_hi]."""
        return self.count_upto(n_lo - 1) + 1, self.count_upto(n_hi)


def complement(nu: IndexSequence, horizon: int) -> IndexSequence:
    """The complementary sequence mu, with Ran(mu) = N minus Ran(nu)."""
    if nu.kind == "complement":
        return nu.base
    if nu.kind == "all":
        raise NotProper("the full sequence of naturals has no proper complement")
    horizon = int(horizon)
    if not nu.is_finite and nu.count_upto(horizon) - nu.count_upto(horizon // 2) >= horizon - horizon // 2:
        raise NotProper(f"{nu.label} covers every index in ({horizon // 2}, {horizon}]")
    return IndexSequence("complement", base=nu)


def parse_index_sequence(spec: str) -> IndexSequence:
    s = spec.strip()
    name, _, rest = s.partition(":")
    if name in ("even", "evens"):
        return IndexSequence.evens()
    if name in ("odd", "odds"):
        return IndexSequence.odds()
    if name in ("squares", "primes"):
        return IndexSequence(name)
    if name in ("all", "naturals"):
        return IndexSequence.naturals()
    if name == "complement":
        return IndexSequence("complement", base=parse_index_sequence(rest))
    if name == "list":
        return IndexSequence.explicit(int(v) for v in rest.split(";") if v.strip())
    params = dict(item.split("=", 1) for item in rest.split(",") if "=" in item)
    try:
        if name == "power":
            return IndexSequence.power(int(params.get("b", 2)))
        if name in ("arith", "arithmetic"):
            return IndexSequence.arithmetic(int(params["q"]), int(params.get("r", 0)))
    except (KeyError, ValueError) as exc:
        raise BadParam(f"bad index sequence spec {spec!r}") from exc
    raise UnknownId(f"index sequence {spec!r}")


@dataclass(frozen=True)
class SubexpReport:
    max_tail_ratio: float
    min_tail_ratio: float
    trend: str
    exponential: bool


def subexponential_diagnostic(nu: IndexSequence, K: int) -> SubexpReport:
    """Finite-prefix look at n_{k+1}/n_k over k in [K/2, K].

    ``exponential`` is set when every ratio in the range stays >= 1.25,
    i.e. nothing suggests the ratios approach 1.
    """
    if K < 10:
        raise BadParam("K must be >= 10")
    ns = nu.nth_array(K // 2, K + 1).astype(np.float64)
    ratios = ns[1:] / ns[:-1]
    d = np.diff(ratios)
    if np.all(d == 0):
        trend = "constant"
    elif np.all(d <= 0):
        trend = "decreasing"
    elif np.all(d >= 0):
        trend = "increasing"
    else:
        trend = "mixed"
    return SubexpReport(float(ratios.max()), float(ratios.min()), trend,
                        bool(ratios.min() >= 1.25))
