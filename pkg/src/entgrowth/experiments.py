"""Seeded empirical probes of the subsequence functionals.

Every probe evaluates independent sample points, optionally on a thread
pool, and assembles results in sample order, so a report depends only on
its parameters. Random points come from a per-sample generator seeded with
``(seed, i)`` (plus a disk index where several disks are sampled).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .coeffs import CoefficientSource, IndexSequence, subexponential_diagnostic
from .errors import AllSkipped, BadParam, NotSubexponential
from .growth import default_window
from .subseq import sigma_nu, tau_nu, theta_nu

DIVERGENCE_FACTOR = 2.0
DEFAULT_K_SCHEDULE = (200, 500, 1000, 2000)
GDELTA_SAMPLES = 25
COVERAGE_WARN = 0.05
QUAD_SLACK = 0.02


@dataclass(frozen=True)
class SamplingSpec:
    """Points in the disk |z - center| <= radius.

    ``mode`` is "uniform" (``count`` points, seeded) or "grid" (a
    ``side`` x ``side`` lattice over the bounding square, clipped to the
    disk; odd ``side`` puts a node on the center). ``extra`` points are
    appended verbatim.
    """

    center: complex = 0j
    radius: float = 1.0
    mode: str = "uniform"
    count: int = 0
    seed: Optional[int] = None
    side: int = 0
    extra: tuple = ()

    def __post_init__(self):
        if not self.radius > 0:
            raise BadParam("radius must be positive")
        if self.mode not in ("uniform", "grid"):
            raise BadParam(f"unknown sampling mode {self.mode!r}")
        if self.mode == "uniform" and self.count > 0 and self.seed is None:
            raise BadParam("uniform sampling needs a seed")

    def points(self) -> list:
        c = complex(self.center)
        if self.mode == "uniform":
            pts = uniform_disk_points(c, self.radius, self.count, (int(self.seed or 0),))
        else:
            pts = grid_disk_points(c, self.radius, self.side)
        return pts + [complex(z) for z in self.extra]

    def to_dict(self) -> dict:
        return {
            "center": [complex(self.center).real, complex(self.center).imag],
            "radius": self.radius,
            "mode": self.mode,
            "count": self.count,
            "seed": self.seed,
            "side": self.side,
            "extra": [[complex(z).real, complex(z).imag] for z in self.extra],
        }


def uniform_disk_points(center: complex, radius: float, count: int, key: tuple) -> list:
    """Point i uses its own generator seeded by ``key + (i,)``."""
    pts = []
    for i in range(count):
        u1, u2 = np.random.default_rng([*key, i]).random(2)
        r = radius * math.sqrt(u1)
        phi = 2.0 * math.pi * u2
        pts.append(center + complex(r * math.cos(phi), r * math.sin(phi)))
    return pts


def grid_disk_points(center: complex, radius: float, side: int) -> list:
    if side <= 0:
        return []
    if side == 1:
        return [center]
    offs = [radius * (2.0 * j / (side - 1) - 1.0) for j in range(side)]
    # offsets are symmetric, so the middle one is exactly 0 for odd side
    if side % 2:
        offs[side // 2] = 0.0
    out = []
    for y in offs:
        for x in offs:
            if x * x + y * y <= radius * radius * (1 + 1e-12):
                out.append(center + complex(x, y))
    return out


def _map(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _json_value(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, complex):
        return [_json_value(x.real), _json_value(x.imag)]
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if isinstance(x, np.generic):
        return _json_value(x.item())
    return x


def dumps_json(obj) -> str:
    """Canonical JSON: sorted keys, repr floats, infinities as strings."""
    return json.dumps(_json_value(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def rows_to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


@dataclass
class ExperimentReport:
    kind: str
    params: dict
    records: list
    exceptional_count: int = 0
    exceptional_fraction: float = 0.0
    curves: dict = field(default_factory=dict)
    seed: Optional[int] = None
    diagnostics: dict = field(default_factory=dict)
    csv_header: tuple = ()
    csv_rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "records": self.records,
            "exceptional_count": self.exceptional_count,
            "exceptional_fraction": self.exceptional_fraction,
            "curves": self.curves,
            "seed": self.seed,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    def to_csv(self) -> str:
        return rows_to_csv(self.csv_header, self.csv_rows)


def _z(z: complex) -> list:
    return [z.real, z.imag]


def _require_subexponential(nu: IndexSequence, horizon: int) -> dict:
    if nu.kind == "all":
        return {"max_ratio_tail": 1.0, "exponential": False}
    K = max(nu.count_upto(horizon), 10)
    rep = subexponential_diagnostic(nu, K)
    if rep.exponential:
        raise NotSubexponential(f"{nu.label} grows exponentially (tail ratio {rep.min_tail_ratio:.3g})")
    return {"max_ratio_tail": rep.max_tail_ratio, "exponential": False}


def _value(fn):
    try:
        return fn().value
    except AllSkipped:
        return None


def _pair(fn_nu, fn_full):
    """(nu value, full value) for one sample; None where nothing was usable."""
    return _value(fn_nu), _value(fn_full)


def _finish(kind, params, records, seed, diagnostics, n) -> ExperimentReport:
    count = sum(1 for r in records if r.get("exceptional"))
    return ExperimentReport(kind, params, records, count, count / n if n else 0.0,
                            seed=seed, diagnostics=diagnostics)


def ae_order_experiment(src: CoefficientSource, nu: IndexSequence, spec: SamplingSpec,
                        window=None, tol: float = 0.05, workers: int = 1) -> ExperimentReport:
    """Compare theta over nu with theta over all indices at each sample point.

    Both estimates use the same n-window, so their common finite-window
    bias cancels. A point is exceptional when the two differ by more than
    ``tol`` or when the nu-value is 0 while the full value exceeds ``tol``.
    """
    window = tuple(window or default_window(2000))
    diag = {"subexponential": _require_subexponential(nu, window[1])}
    full = IndexSequence.naturals()
    kw_nu, kw_full = nu.k_window(*window), full.k_window(*window)
    pts = spec.points()

    def one(z):
        v_nu, v_full = _pair(lambda: theta_nu(src, nu, z, kw_nu), lambda: theta_nu(src, full, z, kw_full))
        rec = {"z": _z(z), "theta_nu": v_nu, "theta_full": v_full}
        if v_nu is None or v_full is None:
            rec.update(exceptional=False, structurally_empty=True)
        else:
            rec["exceptional"] = abs(v_nu - v_full) > tol or (v_nu == 0.0 and v_full > tol)
        return rec

    records = _map(one, pts, workers)
    params = {"source": src.id, "nu": nu.label, "sampling": spec.to_dict(),
              "window": list(window), "tol": tol}
    return _finish("ae_order", params, records, spec.seed, diag, len(pts))


def ae_type_experiment(src: CoefficientSource, nu: IndexSequence, spec: SamplingSpec, rho: float,
                       window=None, tol_rel: float = 0.1, workers: int = 1) -> ExperimentReport:
    """Relative gap between tau over nu and tau over all indices per sample."""
    window = tuple(window or default_window(2000))
    diag = {"subexponential": _require_subexponential(nu, window[1])}
    full = IndexSequence.naturals()
    kw_nu, kw_full = nu.k_window(*window), full.k_window(*window)
    pts = spec.points()

    def one(z):
        v_nu, v_full = _pair(lambda: tau_nu(src, nu, z, rho, kw_nu),
                             lambda: tau_nu(src, full, z, rho, kw_full))
        rec = {"z": _z(z), "tau_nu": v_nu, "tau_full": v_full}
        if v_nu is None or v_full is None:
            rec.update(exceptional=False, structurally_empty=True)
        else:
            gap = abs(v_nu - v_full)
            rec["exceptional"] = gap > tol_rel * v_full if v_full > 0 else gap > 0
        return rec

    records = _map(one, pts, workers)
    params = {"source": src.id, "nu": nu.label, "sampling": spec.to_dict(), "rho": rho,
              "window": list(window), "tol_rel": tol_rel}
    return _finish("ae_type", params, records, spec.seed, diag, len(pts))


def gdelta_probe(src: CoefficientSource, nu: IndexSequence, disks: Sequence, rho: float,
                 K_schedule: Sequence[int] = DEFAULT_K_SCHEDULE, seed: int = 0,
                 samples: int = GDELTA_SAMPLES, workers: int = 1) -> ExperimentReport:
    """Running sup of sigma over nu on random points of each disk.

    ``disks`` holds (center, radius) pairs. A disk shows the divergence
    signature when the sup over its samples grows by at least a factor 2
    from the first to the last K. This is evidence only: no finite run
    certifies an infinite value.
    """
    K_schedule = [int(k) for k in K_schedule]
    if any(b <= a for a, b in zip(K_schedule, K_schedule[1:])) or not K_schedule:
        raise BadParam("K_schedule must be a nonempty increasing list")
    K_max = K_schedule[-1]
    jobs = []
    for d, (c, r) in enumerate(disks):
        for z in uniform_disk_points(complex(c), float(r), samples, (seed, d)):
            jobs.append((d, z))

    def one(job):
        c = sigma_nu(src, nu, job[1], rho, K_max)
        return [c.at(K) for K in K_schedule], c.skipped

    results = _map(one, jobs, workers)
    records = []
    for d, (c, r) in enumerate(disks):
        rows = [res for (dd, _), res in zip(jobs, results) if dd == d]
        sups = [max(row[0][j] for row in rows) for j in range(len(K_schedule))]
        rec = {"disk": d, "center": _z(complex(c)), "radius": float(r), "sup_by_K": sups,
               "skipped": sum(row[1] for row in rows)}
        if len(K_schedule) < 2:
            rec.update(growth=None, signature=False, degenerate=True)
        else:
            growth = sups[-1] / sups[0] if sups[0] > 0 else math.inf
            rec.update(growth=growth, signature=growth >= DIVERGENCE_FACTOR, degenerate=False)
        records.append(rec)
    params = {"source": src.id, "nu": nu.label, "rho": rho, "K_schedule": K_schedule,
              "disks": [[_z(complex(c)), float(r)] for c, r in disks], "samples": samples}
    diag = {"evidence_only": True, "degenerate": len(K_schedule) < 2,
            "all_signatures": bool(records) and all(r["signature"] for r in records)}
    report = ExperimentReport("gdelta", params, records, seed=seed, diagnostics=diag)
    report.curves = {"K": K_schedule, "sup_by_disk": [r["sup_by_K"] for r in records]}
    report.csv_header = ("disk", "K", "sup_sigma")
    report.csv_rows = [(r["disk"], K, s) for r in records for K, s in zip(K_schedule, r["sup_by_K"])]
    return report


def ring_spoke_nodes(center: complex, radius: float, rings: int, spokes: int):
    """Nodes and weights (summing to 1) of the ring-and-spoke disk rule.

    Ring i sits at the midpoint radius (i - 1/2) r / R and carries weight
    proportional to that radius.
    """
    radii = (np.arange(1, rings + 1) - 0.5) / rings * radius
    angles = 2.0 * np.pi * np.arange(spokes) / spokes
    nodes = (center + radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    w = np.repeat(radii / radii.sum() / spokes, spokes)
    return nodes, w


def phi_value(src, nu, z, window) -> Optional[float]:
    """sup of |g^(n)(z)|^(1/(n ln n)) over members of nu in the n-window, or None."""
    try:
        return theta_nu(src, nu, z, nu.k_window(*window)).value
    except AllSkipped:
        return None


@dataclass(frozen=True)
class MeanValueReport:
    center_value: float
    average: float
    slack: float
    holds: bool
    excluded: int
    nodes: int
    coverage_warning: bool

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def mean_value_check(src: CoefficientSource, nu: IndexSequence, window, center: complex,
                     radius: float, rings: int = 16, spokes: int = 32,
                     workers: int = 1) -> MeanValueReport:
    """Sub-mean-value test for the truncated sup Phi over a disk.

    Phi(z) is the sup of the theta terms over n_k in ``window``. The
    center value must not exceed the quadrature average by more than
    0.02 * (max - min) over the nodes. Nodes where Phi is undefined are
    dropped and the weights renormalized.
    """
    if rings < 16 or spokes < 32:
        raise BadParam("quadrature needs at least 16 rings and 32 spokes")
    center = complex(center)
    c_val = phi_value(src, nu, center, window)
    if c_val is None:
        raise AllSkipped(f"Phi undefined at the center {center}")
    nodes, w = ring_spoke_nodes(center, radius, rings, spokes)
    vals = _map(lambda z: phi_value(src, nu, complex(z), window), nodes.tolist(), workers)
    keep = np.array([v is not None for v in vals])
    v = np.array([x if x is not None else 0.0 for x in vals])
    excluded = int((~keep).sum())
    if not keep.any():
        raise AllSkipped("Phi undefined on every quadrature node")
    wk = w[keep] / w[keep].sum()
    avg = math.fsum((wk * v[keep]).tolist())
    slack = QUAD_SLACK * float(v[keep].max() - v[keep].min())
    return MeanValueReport(c_val, avg, slack, c_val <= avg + slack, excluded, len(nodes),
                           excluded > COVERAGE_WARN * len(nodes))


def circle_integral_probe(src: CoefficientSource, nu: IndexSequence, rho: float, center: complex,
                          radius: float, K_schedule: Sequence[int] = (200, 2000), S: int = 64,
                          workers: int = 1) -> ExperimentReport:
    """Trapezoidal integrals of sigma and ln(sigma) over a circle, per K.

    Signature: both curves strictly increasing with last/first >= 2.
    """
    K_schedule = [int(k) for k in K_schedule]
    if not K_schedule or any(b <= a for a, b in zip(K_schedule, K_schedule[1:])):
        raise BadParam("K_schedule must be a nonempty increasing list")
    center = complex(center)
    nodes = [center + radius * complex(math.cos(2 * math.pi * j / S), math.sin(2 * math.pi * j / S))
             for j in range(S)]
    curves = _map(lambda z: sigma_nu(src, nu, z, rho, K_schedule[-1]), nodes, workers)
    ds = 2.0 * math.pi * radius / S
    int_sigma, int_log = [], []
    for K in K_schedule:
        vals = [c.at(K) for c in curves]
        int_sigma.append(ds * math.fsum(vals))
        int_log.append(ds * math.fsum(math.log(v) if v > 0 else -math.inf for v in vals))

    def signature(curve):
        if len(curve) < 2 or not all(math.isfinite(x) for x in curve):
            return False
        increasing = all(b > a for a, b in zip(curve, curve[1:]))
        return increasing and curve[0] > 0 and curve[-1] / curve[0] >= DIVERGENCE_FACTOR

    records = [{"K": K, "integral_sigma": a, "integral_log_sigma": b}
               for K, a, b in zip(K_schedule, int_sigma, int_log)]
    params = {"source": src.id, "nu": nu.label, "rho": rho, "center": _z(center),
              "radius": radius, "K_schedule": K_schedule, "S": S}
    diag = {"evidence_only": True, "sigma_signature": signature(int_sigma),
            "log_sigma_signature": signature(int_log),
            "skipped": sum(c.skipped for c in curves)}
    report = ExperimentReport("circle_integral", params, records, diagnostics=diag)
    report.curves = {"K": K_schedule, "integral_sigma": int_sigma, "integral_log_sigma": int_log}
    report.csv_header = ("K", "integral_sigma", "integral_log_sigma")
    report.csv_rows = [(K, a, b) for K, a, b in zip(K_schedule, int_sigma, int_log)]
    return report


@dataclass(frozen=True)
class GridSpec:
    """Rectangular lattice [x_min, x_max] x [y_min, y_max] with nx * ny nodes."""

    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = -1.0
    y_max: float = 1.0
    nx: int = 0
    ny: int = 0

    def points(self) -> list:
        def axis(lo, hi, m):
            if m <= 0:
                return []
            if m == 1:
                return [0.5 * (lo + hi)]
            return [lo + (hi - lo) * j / (m - 1) for j in range(m)]
        return [complex(x, y) for y in axis(self.y_min, self.y_max, self.ny)
                for x in axis(self.x_min, self.x_max, self.nx)]

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def exceptional_set_scan(src: CoefficientSource, nu: IndexSequence, grid: GridSpec, window=None,
                         workers: int = 1) -> ExperimentReport:
    """Gap theta_full(z) - theta_nu(z) on a lattice, for visualization only."""
    window = tuple(window or default_window(2000))
    full = IndexSequence.naturals()
    kw_nu, kw_full = nu.k_window(*window), full.k_window(*window)
    pts = grid.points()

    def one(z):
        try:
            v_nu = theta_nu(src, nu, z, kw_nu).value
        except AllSkipped:
            v_nu = math.nan
        try:
            v_full = theta_nu(src, full, z, kw_full).value
        except AllSkipped:
            v_full = math.nan
        return z.real, z.imag, v_full - v_nu

    rows = _map(one, pts, workers)
    params = {"source": src.id, "nu": nu.label, "grid": grid.to_dict(), "window": list(window)}
    report = ExperimentReport("exceptional_scan", params, [], diagnostics={"heuristic": True,
                                                                             "nodes": len(rows)})
    report.csv_header = ("x", "y", "gap")
    report.csv_rows = rows
    return report

