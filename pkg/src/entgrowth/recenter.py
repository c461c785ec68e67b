"""Recentered Taylor coefficients a_n(zeta) = g^(n)(zeta)/n! with error bounds.

The shift series is ``a_n(zeta) = sum_m C(n+m, m) a_{n+m} zeta^m``. Summation
stops once the last ``run`` nonzero terms have each shrunk by a factor of at
least 4 relative to the larger of the two nonzero terms before them, and each
added less than ``eps_rel`` of the running sum. Comparing against two
predecessors lets sums of interleaved parity parts (even terms from one
function, odd from another) settle. With e the larger of the last two terms,
the tail is then at most 2e/3; the reported truncation bound doubles that.

``tail_bound`` is the total error bound: truncation plus an allowance for
rounding in the log-gamma term magnitudes and in the summation itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coeffs import (AMBIGUOUS, EXACT_ZERO, OK, UNCERTIFIED, CoefficientSource,
                     log_factorial)
from .errors import NotCertified, ZeroAmbiguous
from .growth import SharpSum, _is_stagnant, log_sum
from .xarith import XComplex, XReal

EPS = 2.0 ** -52
LOG_QUARTER = -math.log(4.0)
# derivative tables are computed in aligned blocks so that the value for a
# given index never depends on which other indices were requested
BLOCK = 128


@dataclass(frozen=True)
class RecenterPolicy:
    eps_rel: float = 2.0 ** -53
    eps_abs: float = 0.0
    max_terms: int = 8192
    run: int = 30


DEFAULT_POLICY = RecenterPolicy()


@dataclass(frozen=True)
class CertifiedValue:
    value: XComplex
    tail_bound: XReal
    truncation_bound: XReal
    terms_used: int

    @property
    def certified(self) -> bool:
        return not self.tail_bound.is_inf

    @property
    def zero_ambiguous(self) -> bool:
        """True when the error interval contains 0 and the value is not an exact zero."""
        if self.value.is_zero and self.tail_bound.is_zero:
            return False
        return self.value.abs() <= self.tail_bound

    def require_certified(self) -> CertifiedValue:
        if not self.certified:
            raise NotCertified(f"max_terms reached after {self.terms_used} terms")
        return self


def _term_error(*logs) -> float:
    return 16.0 * EPS * sum(abs(x) for x in logs)


def recentered_coeff(src: CoefficientSource, zeta: complex, n: int,
                     policy: RecenterPolicy = DEFAULT_POLICY) -> CertifiedValue:
    """Sequential XComplex evaluation of a_n(zeta); the reference path."""
    zeta, n = complex(zeta), int(n)
    if zeta == 0:
        return CertifiedValue(src.coeff(n), XReal.zero(), XReal.zero(), 1)
    if src.degree is not None and n > src.degree:
        return CertifiedValue(XComplex.zero(), XReal.zero(), XReal.zero(), 0)
    log_r = math.log(abs(zeta))
    arg = math.atan2(zeta.imag, zeta.real)
    lf_n = math.lgamma(n + 1)
    partial, sum_abs = XComplex.zero(), XReal.zero()
    delta, prev, prev2, run = 0.0, None, -math.inf, 0
    chunk_L = chunk_P = None
    chunk_start = n
    for m in range(policy.max_terms):
        j = n + m
        if src.degree is not None and j > src.degree:
            rounding = sum_abs * XReal.from_float(delta + 2 * m * EPS)
            return CertifiedValue(partial, rounding, XReal.zero(), m)
        if chunk_L is None or j >= chunk_start + len(chunk_L):
            chunk_start = j
            chunk_L, chunk_P = src.coeffs_array(np.arange(j, j + 256))
        Lj = float(chunk_L[j - chunk_start])
        if Lj == -math.inf:
            continue
        lf_j, lf_m = math.lgamma(j + 1), math.lgamma(m + 1)
        logt = lf_j - lf_n - lf_m + Lj + m * log_r
        term = XComplex.from_log(logt, complex(chunk_P[j - chunk_start]) * complex(math.cos(m * arg), math.sin(m * arg)))
        partial = partial + term
        sum_abs = sum_abs + XReal.from_log(logt)
        delta = max(delta, _term_error(lf_j, lf_n, lf_m, Lj, m * log_r))
        ratio_ok = prev is not None and logt - max(prev, prev2) <= LOG_QUARTER
        threshold = partial.abs() * XReal.from_float(policy.eps_rel) + XReal.from_float(policy.eps_abs)
        small = XReal.from_log(logt) < threshold
        run = run + 1 if (ratio_ok and small) else 0
        if run >= policy.run:
            trunc = XReal.from_log(max(logt, prev) + math.log(4.0 / 3.0))
            rounding = sum_abs * XReal.from_float(delta + 2 * (m + 1) * EPS)
            return CertifiedValue(partial, trunc + rounding, trunc, m + 1)
        prev, prev2 = logt, (prev if prev is not None else -math.inf)
    return CertifiedValue(partial, XReal.inf(), XReal.inf(), policy.max_terms)


def _recenter_block(src: CoefficientSource, zeta: complex, n0: int, size: int,
                    policy: RecenterPolicy):
    """Vectorized a_n(zeta) for n in [n0, n0+size).

    Returns (log|a_n(zeta)|, phase, log tail_bound, status).
    """
    ns = np.arange(n0, n0 + size, dtype=np.int64)
    if zeta == 0:
        L, P = src.coeffs_array(ns)
        status = np.where(np.isfinite(L), OK, EXACT_ZERO).astype(np.int8)
        return L, P, np.full(size, -np.inf), status
    log_r = math.log(abs(zeta))
    arg = math.atan2(zeta.imag, zeta.real)
    lf_n = log_factorial(ns)
    deg = src.degree
    M = 64
    while True:
        m = np.arange(M, dtype=np.int64)
        js = np.arange(n0, n0 + size + M - 1, dtype=np.int64)
        Lc, Pc = src.coeffs_array(js)
        lfc = log_factorial(js)
        lf_m = log_factorial(m)
        gather = ns[:, None] - n0 + m[None, :]
        Lj, Pj, lf_j = Lc[gather], Pc[gather], lfc[gather]
        nz = np.isfinite(Lj)
        with np.errstate(invalid="ignore"):
            LT = np.where(nz, lf_j - lf_n[:, None] - lf_m[None, :] + Lj + m * log_r, -np.inf)
        s = np.max(LT, axis=1)
        s = np.where(np.isfinite(s), s, 0.0)
        absT = np.where(nz, np.exp(LT - s[:, None]), 0.0)
        rot = np.exp(1j * arg * m.astype(np.float64))
        T = absT * Pj * rot[None, :]
        C = np.cumsum(T, axis=1)
        absC = np.abs(C)

        idx = np.broadcast_to(m, LT.shape)
        last_nz = np.maximum.accumulate(np.where(nz, idx, -1), axis=1)
        prev_nz = np.concatenate([np.full((size, 1), -1), last_nz[:, :-1]], axis=1)
        prev2_nz = np.where(prev_nz >= 0, np.take_along_axis(prev_nz, np.clip(prev_nz, 0, None), axis=1), -1)
        prev_LT = np.take_along_axis(LT, np.clip(prev_nz, 0, None), axis=1)
        prev2_LT = np.where(prev2_nz >= 0, np.take_along_axis(LT, np.clip(prev2_nz, 0, None), axis=1), -np.inf)
        with np.errstate(invalid="ignore"):
            ratio_ok = nz & (prev_nz >= 0) & (LT - np.maximum(prev_LT, prev2_LT) <= LOG_QUARTER)
        threshold = policy.eps_rel * absC
        if policy.eps_abs > 0:
            with np.errstate(over="ignore"):
                threshold = threshold + policy.eps_abs * np.exp(-s)[:, None]
        good = ratio_ok & (absT < threshold)
        bad = nz & ~good
        last_bad = np.maximum.accumulate(np.where(bad, idx, -1), axis=1)
        cg = np.cumsum(good, axis=1)
        cg_bad = np.where(last_bad >= 0, np.take_along_axis(cg, np.clip(last_bad, 0, None), axis=1), 0)
        stop = nz & (cg - cg_bad >= policy.run)
        has_stop = stop.any(axis=1)
        mstar = np.argmax(stop, axis=1)
        exact = np.zeros(size, dtype=bool)
        if deg is not None:
            exact = ns + M - 1 >= deg
            mstar = np.where(exact, np.clip(deg - ns, 0, M - 1), mstar)
        done = has_stop | exact
        if done.all() or M >= policy.max_terms:
            break
        M = min(2 * M, policy.max_terms)

    rows = np.arange(size)
    val = C[rows, mstar]
    env = np.maximum(absT[rows, mstar], absT[rows, np.clip(prev_nz[rows, mstar], 0, None)])
    trunc = np.where(exact, 0.0, (4.0 / 3.0) * env)
    sum_abs = np.cumsum(absT, axis=1)[rows, mstar]
    with np.errstate(invalid="ignore"):
        mag = np.where(nz, np.abs(lf_j) + np.abs(lf_n)[:, None] + np.abs(lf_m)[None, :]
                       + np.abs(np.where(nz, Lj, 0.0)) + np.abs(m * log_r), 0.0)
    delta = 16.0 * EPS * np.maximum.accumulate(mag, axis=1)[rows, mstar]
    bound = trunc + sum_abs * (delta + 2.0 * (mstar + 1) * EPS)
    if deg is not None:
        beyond = ns > deg
        val = np.where(beyond, 0j, val)
        bound = np.where(beyond, 0.0, bound)
    absval = np.abs(val)
    status = np.full(size, OK, dtype=np.int8)
    status[absval <= bound] = AMBIGUOUS
    status[(absval == 0) & (bound == 0)] = EXACT_ZERO
    status[~done] = UNCERTIFIED
    with np.errstate(divide="ignore"):
        log_val = np.where(absval > 0, s + np.log(np.where(absval > 0, absval, 1.0)), -np.inf)
        log_bound = np.where(bound > 0, s + np.log(np.where(bound > 0, bound, 1.0)), -np.inf)
    log_bound = np.where(done, log_bound, np.inf)
    phase = np.where(absval > 0, val / np.where(absval > 0, absval, 1.0), 0j)
    return log_val, phase, log_bound, status


@lru_cache(maxsize=16384)
def _recenter_block_cached(src, zeta, block, policy):
    out = _recenter_block(src, zeta, block * BLOCK, BLOCK, policy)
    for a in out:
        a.setflags(write=False)
    return out


@lru_cache(maxsize=16384)
def _derivative_block(src, z, block, policy):
    ns = np.arange(block * BLOCK, (block + 1) * BLOCK, dtype=np.int64)
    if src.has_derivative_exact:
        L, S = src.derivative_log_abs_exact(z, ns)
    else:
        la, _, _, S = _recenter_block_cached(src, z, block, policy)
        L = np.where(S == OK, log_factorial(ns) + la, -np.inf)
    L = np.array(L, dtype=np.float64)
    S = np.array(S, dtype=np.int8)
    L.setflags(write=False)
    S.setflags(write=False)
    return L, S


def _gather(fetch, ns):
    ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
    blocks = ns // BLOCK
    outs = None
    for b in np.unique(blocks):
        parts = fetch(int(b))
        if outs is None:
            outs = [np.empty(ns.shape, dtype=p.dtype) for p in parts]
        sel = blocks == b
        for o, p in zip(outs, parts):
            o[sel] = p[ns[sel] - b * BLOCK]
    if outs is None:
        return np.zeros(0), np.zeros(0, dtype=np.int8)
    return tuple(outs)


def derivative_log_abs_many(src: CoefficientSource, z: complex, ns,
                            policy: RecenterPolicy = DEFAULT_POLICY):
    """(log|g^(n)(z)|, status) for each n; the exact oracle is used when present.

    Status codes come from :mod:`entgrowth.coeffs`: OK, EXACT_ZERO,
    AMBIGUOUS, UNCERTIFIED. Non-OK entries carry log -inf.
    """
    z = complex(z)
    return _gather(lambda b: _derivative_block(src, z, b, policy), ns)


def recentered_coeffs(src: CoefficientSource, zeta: complex, ns,
                      policy: RecenterPolicy = DEFAULT_POLICY):
    """Vectorized a_n(zeta): (log|value|, phase, log tail_bound, status)."""
    zeta = complex(zeta)
    return _gather(lambda b: _recenter_block_cached(src, zeta, b, policy), ns)


def derivative_log_abs(src: CoefficientSource, z: complex, n: int,
                       policy: RecenterPolicy = DEFAULT_POLICY) -> float:
    """ln|g^(n)(z)|; -inf for a provable zero.

    Raises ZeroAmbiguous when the certified interval contains zero, and
    NotCertified when the shift series did not converge within max_terms.
    """
    L, S = derivative_log_abs_many(src, z, [n], policy)
    if S[0] == AMBIGUOUS:
        raise ZeroAmbiguous(f"{src.id}: g^({n})({complex(z)}) indistinguishable from 0")
    if S[0] == UNCERTIFIED:
        raise NotCertified(f"{src.id}: shift series at n={n} not certified")
    return float(L[0])


def recentered_source(src: CoefficientSource, zeta: complex,
                      policy: RecenterPolicy = DEFAULT_POLICY) -> CoefficientSource:
    """The translate g(z + zeta) as a source, coefficients by recentering."""
    zeta = complex(zeta)

    def kernel(ns):
        L, P, _, S = recentered_coeffs(src, zeta, ns, policy)
        if np.any(S == AMBIGUOUS) or np.any(S == UNCERTIFIED):
            bad = ns[(S == AMBIGUOUS) | (S == UNCERTIFIED)]
            raise ZeroAmbiguous(f"{src.id} recentered at {zeta}: indices {bad[:5].tolist()} not resolved")
        return L, P

    return CoefficientSource(f"{src.id}@{zeta}", kernel, None, src.ground_truth, src.degree)


def max_derivative_on_circle(src: CoefficientSource, r: float, n: int, S: int = 64,
                             policy: RecenterPolicy = DEFAULT_POLICY) -> XReal:
    """Max of |g^(n)| over S equispaced points of |z| = r; a lower bound for m_n(r)."""
    if S < 64:
        raise ValueError("need at least 64 samples")
    best = -math.inf
    seen = False
    for s in range(S):
        t = 2.0 * math.pi * s / S
        z = complex(r * math.cos(t), r * math.sin(t))
        L, St = derivative_log_abs_many(src, z, [n], policy)
        if St[0] in (OK, EXACT_ZERO):
            seen = True
            best = max(best, float(L[0]))
    if not seen:
        raise ZeroAmbiguous(f"{src.id}: every sample of g^({n}) on |z|={r} is ambiguous")
    return XReal.from_log(best)


def sharp_derivative_terms_log(src: CoefficientSource, r: float, n: int, N: int) -> np.ndarray:
    m = np.arange(0, N + 1, dtype=np.int64)
    L = src.log_abs_coeffs(m + n)
    return log_factorial(m + n) - log_factorial(m) + L + m * math.log(r)


def sharp_derivative(src: CoefficientSource, r: float, n: int, N=None) -> SharpSum:
    """(g#)^(n)(r) = sum_m (n+m)!/m! |a_{n+m}| r^m, partial to N (or until stagnant)."""
    if not r > 0:
        raise ValueError("r must be positive")
    if N is not None:
        logs = sharp_derivative_terms_log(src, r, n, N)
        return SharpSum(XReal.from_log(log_sum(logs)), _is_stagnant(logs), N)
    if src.degree is not None:
        N = max(src.degree - n, 0)
        return SharpSum(XReal.from_log(log_sum(sharp_derivative_terms_log(src, r, n, N))), True, N)
    N = 64
    while True:
        logs = sharp_derivative_terms_log(src, r, n, N)
        if _is_stagnant(logs) or N >= 1 << 22:
            return SharpSum(XReal.from_log(log_sum(logs)), _is_stagnant(logs), N)
        N *= 2
