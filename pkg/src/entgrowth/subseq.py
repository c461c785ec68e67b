"""Growth functionals restricted to a subsequence of derivative indices.

For a point z and indices n_k the terms are

* rho:   n ln n / (-ln|a_n(z)|)
* theta: |g^(n)(z)|^(1/(n ln n))
* tau:   (1/(e rho)) n |a_n(z)|^(rho/n)
* sigma: n^(1-rho) |g^(n)(z)|^(rho/n)

with a_n(z) = g^(n)(z)/n!. Provable zeros enter theta/tau/sigma as 0; for
rho they are recorded as 0 but carry no information, so a window holding
nothing else raises AllSkipped. Ambiguous values are always excluded.

Terms are evaluated one index at a time with :mod:`math` on cached
derivative blocks, so a term never depends on which other indices were
requested. That is what makes the partition identity exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coeffs import EXACT_ZERO, OK, CoefficientSource, IndexSequence, complement
from .errors import AllSkipped, RhoOutOfRange
from .recenter import DEFAULT_POLICY, RecenterPolicy, derivative_log_abs_many

FUNCTIONALS = ("rho", "theta", "tau", "sigma")

_TERM, _ZERO, _SKIP = 0, 1, 2


def _check_rho(rho):
    if rho is None or not 0 < rho < math.inf:
        raise RhoOutOfRange(f"need 0 < rho < inf, got {rho!r}")


def functional_terms(src: CoefficientSource, ns, z: complex, kind: str,
                     rho: Optional[float] = None, policy: RecenterPolicy = DEFAULT_POLICY):
    """Per-index terms and codes (0 = term, 1 = provable zero, 2 = skipped)."""
    if kind not in FUNCTIONALS:
        raise ValueError(f"unknown functional {kind!r}")
    if kind in ("tau", "sigma"):
        _check_rho(rho)
    ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
    L, S = derivative_log_abs_many(src, z, ns, policy)
    terms = [0.0] * len(ns)
    codes = [_SKIP] * len(ns)
    for i, (n, lg, st) in enumerate(zip(ns.tolist(), L.tolist(), S.tolist())):
        if st not in (OK, EXACT_ZERO):
            continue
        if kind in ("rho", "theta") and n < 2:
            continue
        if st == EXACT_ZERO:
            codes[i] = _ZERO
            continue
        if kind == "rho":
            neg_log_a = math.lgamma(n + 1) - lg
            if neg_log_a <= 0:
                continue
            terms[i] = n * math.log(n) / neg_log_a
        elif kind == "theta":
            terms[i] = math.exp(lg / (n * math.log(n)))
        elif kind == "tau":
            terms[i] = math.exp(math.log(n) + (rho / n) * (lg - math.lgamma(n + 1))) / (math.e * rho)
        else:
            terms[i] = math.exp((1.0 - rho) * math.log(n) + (rho / n) * lg)
        codes[i] = _TERM
    return ns, terms, codes


@dataclass(frozen=True)
class SubseqEstimate:
    functional: str
    value: float
    k_window: tuple
    z: complex
    skipped: int
    exact_zeros: int
    series: tuple

    def to_dict(self) -> dict:
        return {
            "functional": self.functional,
            "value": self.value,
            "k_window": list(self.k_window),
            "z": [self.z.real, self.z.imag],
            "skipped": self.skipped,
            "exact_zeros": self.exact_zeros,
        }


def default_k_window(nu: IndexSequence, N: int) -> tuple:
    """k range with n_k in [N/2, N], mirroring the coefficient-side windows."""
    return nu.k_window(max(2, N // 2), N)


def _estimate(src, nu, z, k_window, kind, rho, policy) -> SubseqEstimate:
    z = complex(z)
    k_min, k_max = int(k_window[0]), int(k_window[1])
    ns = nu.nth_array(k_min, k_max) if k_max >= k_min else np.zeros(0, dtype=np.int64)
    ns, terms, codes = functional_terms(src, ns, z, kind, rho, policy)
    series = [(int(n), t) for n, t, c in zip(ns.tolist(), terms, codes) if c != _SKIP]
    n_terms = codes.count(_TERM)
    n_zero = codes.count(_ZERO)
    informative = n_terms if kind == "rho" else n_terms + n_zero
    if informative == 0:
        raise AllSkipped(f"{kind}_nu for {src.id} at z={z}: nothing usable in k-window {tuple(k_window)}")
    return SubseqEstimate(
        functional=kind,
        value=max(t for _, t in series),
        k_window=(k_min, k_max),
        z=z,
        skipped=codes.count(_SKIP),
        exact_zeros=n_zero,
        series=tuple(series),
    )


def rho_nu(src, nu, z, k_window, policy=DEFAULT_POLICY) -> SubseqEstimate:
    return _estimate(src, nu, z, k_window, "rho", None, policy)


def theta_nu(src, nu, z, k_window, policy=DEFAULT_POLICY) -> SubseqEstimate:
    return _estimate(src, nu, z, k_window, "theta", None, policy)


def tau_nu(src, nu, z, rho, k_window, policy=DEFAULT_POLICY) -> SubseqEstimate:
    _check_rho(rho)
    return _estimate(src, nu, z, k_window, "tau", rho, policy)


@dataclass(frozen=True)
class SigmaCurve:
    ks: np.ndarray
    ns: np.ndarray
    terms: np.ndarray
    running_sup: np.ndarray
    last_improved_k: int
    skipped: int

    def at(self, K: int) -> float:
        """Running sup over k <= K."""
        return float(self.running_sup[K - 1])


def sigma_nu(src, nu, z, rho, K, policy=DEFAULT_POLICY) -> SigmaCurve:
    """Running sup of n_k^(1-rho) |g^(n_k)(z)|^(rho/n_k) over k = 1..K.

    Skipped (ambiguous) terms leave the running sup unchanged.
    """
    _check_rho(rho)
    ns = nu.nth_array(1, int(K))
    ns, terms, codes = functional_terms(src, ns, complex(z), "sigma", rho, policy)
    t = np.array([x if c != _SKIP else -np.inf for x, c in zip(terms, codes)])
    run = np.maximum.accumulate(t)
    run = np.where(np.isfinite(run), run, 0.0)
    improved = np.flatnonzero(np.diff(np.concatenate([[-np.inf], np.maximum.accumulate(t)])) > 0)
    last = int(improved[-1]) + 1 if improved.size else 0
    return SigmaCurve(np.arange(1, len(ns) + 1), ns, t, run, last, codes.count(_SKIP))


@dataclass(frozen=True)
class IdentityReport:
    window: tuple
    rho_full: Optional[float]
    rho_nu: Optional[float]
    rho_mu: Optional[float]
    rho_ok: bool
    tau_full: Optional[float]
    tau_nu: Optional[float]
    tau_mu: Optional[float]
    tau_ok: Optional[bool]

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _value_or_none(fn):
    try:
        return fn().value
    except AllSkipped:
        return None


def _partition_ok(full, a, b) -> bool:
    parts = [x for x in (a, b) if x is not None]
    if full is None:
        return not parts
    return bool(parts) and full == max(parts)


def max_identity_check(src, nu, z, rho, horizon, n_min=None,
                       policy=DEFAULT_POLICY) -> IdentityReport:
    """Check full-window sup == max(nu-part, mu-part) for rho and tau, exactly.

    The window is n in [n_min, horizon] (default [horizon/2, horizon]).
    ``tau_ok`` is None when no rho is available for the type functional.
    """
    horizon = int(horizon)
    n_min = max(2, horizon // 2) if n_min is None else int(n_min)
    mu = complement(nu, horizon)
    full = IndexSequence.naturals()
    kw = {s: s.k_window(n_min, horizon) for s in (full, nu, mu)}
    r_full = _value_or_none(lambda: rho_nu(src, full, z, kw[full], policy))
    r_nu = _value_or_none(lambda: rho_nu(src, nu, z, kw[nu], policy))
    r_mu = _value_or_none(lambda: rho_nu(src, mu, z, kw[mu], policy))
    t_full = t_nu = t_mu = t_ok = None
    if rho is not None:
        t_full = _value_or_none(lambda: tau_nu(src, full, z, rho, kw[full], policy))
        t_nu = _value_or_none(lambda: tau_nu(src, nu, z, rho, kw[nu], policy))
        t_mu = _value_or_none(lambda: tau_nu(src, mu, z, rho, kw[mu], policy))
        t_ok = _partition_ok(t_full, t_nu, t_mu)
    return IdentityReport((n_min, horizon), r_full, r_nu, r_mu, _partition_ok(r_full, r_nu, r_mu),
                          t_full, t_nu, t_mu, t_ok)
