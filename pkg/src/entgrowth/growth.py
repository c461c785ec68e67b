"""Order and type estimators.

Coefficient-side estimators take window sups of the termwise order and
type expressions, in log space throughout. Max-modulus estimators work on
the majorant ``g#(r) = sum |a_n| r^n``, which shares order and type with
``g`` and attains the maximum modulus of ``g#`` on the positive axis.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .coeffs import CoefficientSource
from .errors import (DegenerateFit, DomainError, EmptyWindow, GridTooSmall,
                     NotInAsymptoticRegime, RhoOutOfRange)
from .xarith import XReal

E = math.e
# a term adds "nothing" when below this fraction of the partial sum
STAGNATION_REL = 1e-16
STAGNATION_RUN = 20
# relative growth between half-window sups that flags maximal type
DIVERGENCE_RATIO = 1.05


def _jsonable(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
    return x


@dataclass(frozen=True)
class GrowthEstimate:
    value: float
    window: tuple
    method: str
    series: tuple = ()
    bias_note: str = ""
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": _jsonable(self.value),
            "window": [_jsonable(w) for w in self.window],
            "method": self.method,
            "bias_note": self.bias_note,
        }

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "term"])
        for n, t in self.series:
            w.writerow([n, repr(float(t))])
        return buf.getvalue()


def default_window(N: int) -> tuple:
    return max(2, N // 2), N


def _window_indices(window) -> np.ndarray:
    n_min, n_max = int(window[0]), int(window[1])
    if n_min < 2:
        raise ValueError("windows must lie in [2, inf)")
    if n_max < n_min:
        raise EmptyWindow(f"empty window {window}")
    return np.arange(n_min, n_max + 1, dtype=np.int64)


def _check_rho(rho):
    if rho is None or not 0 < rho < math.inf:
        raise RhoOutOfRange(f"type needs 0 < rho < inf, got {rho!r}")


def order_terms(src: CoefficientSource, window):
    """Indices, terms n ln n / (-ln|a_n|), and skipped indices for a window."""
    ns = _window_indices(window)
    L = src.log_abs_coeffs(ns)
    nonzero = np.isfinite(L)
    usable = nonzero & (L < 0)
    skipped = ns[nonzero & ~usable]
    n = ns[usable]
    terms = n * np.log(n) / (-L[usable])
    return n, terms, skipped


def order_from_coeffs(src: CoefficientSource, window) -> GrowthEstimate:
    """Window sup of n ln n / (-ln|a_n|); zero coefficients are skipped."""
    n, terms, skipped = order_terms(src, window)
    if not n.size:
        raise EmptyWindow(f"{src.id}: no usable nonzero coefficient in {tuple(window)}")
    return GrowthEstimate(
        value=float(terms.max()),
        window=(int(window[0]), int(window[1])),
        method="window_sup",
        series=tuple(zip(n.tolist(), terms.tolist())),
        bias_note="window sup of a limsup; converges like 1/ln n, typically from above",
        flags={"skipped_nonpositive": skipped.tolist()},
    )


def order_regression(src: CoefficientSource, window) -> GrowthEstimate:
    """Least-squares fit of ln|a_n| on {n ln n, n, 1}; order = -1/slope."""
    ns = _window_indices(window)
    L = src.log_abs_coeffs(ns)
    keep = np.isfinite(L)
    n = ns[keep].astype(np.float64)
    y = L[keep]
    if n.size < 8:
        raise DegenerateFit(f"{src.id}: {n.size} nonzero coefficients in window, need 8")
    A = np.column_stack([n * np.log(n), n, np.ones_like(n)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope = float(coef[0])
    if not slope < 0:
        raise DegenerateFit(f"{src.id}: n ln n slope {slope} is not negative")
    return GrowthEstimate(
        value=-1.0 / slope,
        window=(int(window[0]), int(window[1])),
        method="regression",
        series=tuple(zip(ns[keep].tolist(), y.tolist())),
        bias_note="basis {n ln n, n, 1}; unmodelled O(ln n) terms bias the slope slightly",
        flags={"coef": [float(c) for c in coef]},
    )


def type_terms(src: CoefficientSource, rho: float, window):
    ns = _window_indices(window)
    L = src.log_abs_coeffs(ns)
    keep = np.isfinite(L)
    n = ns[keep]
    terms = np.exp(np.log(n) + (rho / n) * L[keep]) / (E * rho)
    return n, terms


def type_from_coeffs(src: CoefficientSource, rho: float, window) -> GrowthEstimate:
    """Window sup of (1/(e rho)) n |a_n|^(rho/n).

    ``flags["diverging"]`` compares the sups over the two halves of the
    window; it is the finite stand-in for a maximal-type verdict.
    """
    _check_rho(rho)
    n, terms = type_terms(src, rho, window)
    if not n.size:
        raise EmptyWindow(f"{src.id}: no nonzero coefficient in {tuple(window)}")
    mid = (int(window[0]) + int(window[1])) // 2
    lo, hi = terms[n <= mid], terms[n > mid]
    diverging = bool(lo.size and hi.size and hi.max() > DIVERGENCE_RATIO * lo.max())
    return GrowthEstimate(
        value=float(terms.max()),
        window=(int(window[0]), int(window[1])),
        method="window_sup",
        series=tuple(zip(n.tolist(), terms.tolist())),
        bias_note=f"computed with rho={rho!r}; any error in rho rescales the type",
        flags={"diverging": diverging, "rho": rho},
    )


@dataclass(frozen=True)
class SharpSum:
    value: XReal
    stagnant: bool
    N: int

    def log(self) -> float:
        return self.value.log()


def log_sum(logs: np.ndarray) -> float:
    """ln(sum exp(logs)) with a correctly rounded inner sum."""
    logs = logs[np.isfinite(logs)]
    if not logs.size:
        return -math.inf
    s = float(logs.max())
    return s + math.log(math.fsum(np.exp(logs - s).tolist()))


def _is_stagnant(logs: np.ndarray) -> bool:
    fin = np.isfinite(logs)
    if not fin.any() or logs.size <= STAGNATION_RUN:
        return False
    s = float(logs[fin].max())
    scaled = np.where(fin, np.exp(logs - s), 0.0)
    partial = np.cumsum(scaled)
    tail = slice(logs.size - STAGNATION_RUN, logs.size)
    before = partial[logs.size - STAGNATION_RUN - 1:logs.size - 1]
    return bool(np.all(scaled[tail] < STAGNATION_REL * before))


def sharp_terms_log(src: CoefficientSource, r: float, N: int) -> np.ndarray:
    ns = np.arange(0, N + 1, dtype=np.int64)
    return src.log_abs_coeffs(ns) + ns * math.log(r)


def sharp_value(src: CoefficientSource, r: float, N: Optional[int] = None) -> SharpSum:
    """Partial sum of sum_{n<=N} |a_n| r^n; N=None grows N until stagnant."""
    if not r > 0:
        raise ValueError("r must be positive")
    if N is not None:
        if N < 1:
            raise ValueError("N must be >= 1")
        logs = sharp_terms_log(src, r, N)
        return SharpSum(XReal.from_log(log_sum(logs)), _is_stagnant(logs), N)
    if src.degree is not None:
        # a polynomial's sum is finite and exact
        N = max(src.degree, 1)
        return SharpSum(XReal.from_log(log_sum(sharp_terms_log(src, r, N))), True, N)
    N = 64
    while True:
        logs = sharp_terms_log(src, r, N)
        if _is_stagnant(logs) or N >= 1 << 22:
            return SharpSum(XReal.from_log(log_sum(logs)), _is_stagnant(logs), N)
        N *= 2


def _check_grid(r_grid) -> np.ndarray:
    r = np.asarray(r_grid, dtype=np.float64)
    if r.size < 4 or np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise GridTooSmall("need at least 4 increasing positive radii")
    if r[-1] / r[0] < 8.0:
        raise GridTooSmall("grid must span a factor of at least 8")
    return r


def log_sharp_on_grid(src: CoefficientSource, r_grid) -> np.ndarray:
    return np.array([sharp_value(src, float(r)).log() for r in r_grid])


def order_from_max_modulus(src: CoefficientSource, r_grid: Sequence[float]) -> GrowthEstimate:
    """Slope of ln ln g#(r) against ln r over grid points with g#(r) > e."""
    r = _check_grid(r_grid)
    lg = log_sharp_on_grid(src, r)
    keep = lg > 1.0
    if keep.sum() < 2:
        raise NotInAsymptoticRegime(f"{src.id}: g#(r) <= e on the grid")
    x, y = np.log(r[keep]), np.log(lg[keep])
    slope = float(np.polyfit(x, y, 1)[0])
    return GrowthEstimate(
        value=slope,
        window=(float(r[0]), float(r[-1])),
        method="max_modulus",
        series=tuple(zip(r[keep].tolist(), y.tolist())),
        bias_note="log-log slope of the majorant; lower-order terms bias small radii",
    )


def type_from_max_modulus(src: CoefficientSource, rho: float, r_grid: Sequence[float]) -> GrowthEstimate:
    """Max over the grid of ln g#(r) / r^rho, plus the largest-r trend."""
    _check_rho(rho)
    r = _check_grid(r_grid)
    lg = log_sharp_on_grid(src, r)
    keep = lg > 1.0
    if not keep.any():
        raise NotInAsymptoticRegime(f"{src.id}: g#(r) <= e on the grid")
    ratios = lg[keep] / r[keep] ** rho
    trend = float(ratios[-1] - ratios[-2]) if ratios.size >= 2 else 0.0
    return GrowthEstimate(
        value=float(ratios.max()),
        window=(float(r[0]), float(r[-1])),
        method="max_modulus",
        series=tuple(zip(r[keep].tolist(), ratios.tolist())),
        bias_note=f"finite-grid max with rho={rho!r}",
        flags={"largest_r_trend": trend},
    )


@dataclass(frozen=True)
class ThetaValue:
    theta: float
    rho: float


def theta_of_rho(rho: float) -> ThetaValue:
    """theta = exp(1 - 1/rho), with theta(0) = 0 and theta(inf) = e."""
    if not rho >= 0:
        raise DomainError(f"rho must lie in [0, inf], got {rho!r}")
    if rho == 0:
        return ThetaValue(0.0, 0.0)
    if math.isinf(rho):
        return ThetaValue(E, math.inf)
    return ThetaValue(math.exp(1.0 - 1.0 / rho), float(rho))


def rho_of_theta(theta: float) -> float:
    if not 0 <= theta <= E:
        raise DomainError(f"theta must lie in [0, e], got {theta!r}")
    if theta == 0:
        return 0.0
    if theta == E:
        return math.inf
    return 1.0 / (1.0 - math.log(theta))


def scaled_tail_profile(src: CoefficientSource, rho_prime: float, K: int):
    """(n, n |a_n|^(rho'/n)) over nonzero indices 1 <= n <= K."""
    if not rho_prime > 0:
        raise ValueError("rho_prime must be positive")
    ns = np.arange(1, int(K) + 1, dtype=np.int64)
    L = src.log_abs_coeffs(ns)
    keep = np.isfinite(L)
    n = ns[keep]
    return n, np.exp(np.log(n) + (rho_prime / n) * L[keep])


@dataclass(frozen=True)
class AttainmentReport:
    window: tuple
    order_sup: float
    type_sup: float
    order_attaining: frozenset
    type_attaining: frozenset
    inclusion_holds: bool
    applicable: bool


def attainment_analysis(src: CoefficientSource, rho: float, K: int, tol: float,
                        window=None) -> AttainmentReport:
    """Indices whose order / type terms come within ``tol`` of the window sup.

    ``applicable`` is False when the type sup is within ``tol`` of zero, the
    finite picture of minimal type, where the inclusion says nothing.
    """
    _check_rho(rho)
    window = window or default_window(K)
    n_o, t_o, _ = order_terms(src, window)
    n_t, t_t = type_terms(src, rho, window)
    if not n_o.size or not n_t.size:
        raise EmptyWindow(f"{src.id}: nothing to compare in {window}")
    o_sup, t_sup = float(t_o.max()), float(t_t.max())
    order_set = frozenset(n_o[t_o >= o_sup - tol].tolist())
    type_set = frozenset(n_t[t_t >= t_sup - tol].tolist())
    return AttainmentReport(
        window=tuple(window),
        order_sup=o_sup,
        type_sup=t_sup,
        order_attaining=order_set,
        type_attaining=type_set,
        inclusion_holds=type_set <= order_set,
        applicable=t_sup > tol,
    )
