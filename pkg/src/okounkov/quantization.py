"""Numerical model of section concentration on the toric fiber.

The normalized section labelled by a Bohr-Sommerfeld point m is modelled on
the moment polytope Delta_0 as the density

    rho_s^m(u) = exp(-s * B(u, m)) / Z(s, m),

where B is the Bregman divergence of a strictly convex potential.  This is a
model of the deformed sections, not a formula for them: it reproduces L^1
concentration near m, weak convergence to evaluation at interior m, and
eventual pairwise independence.  Test sections are functions of the action
variables only, so the fiber integral of the limit collapses to tau(m).

The t(s) schedule is computed and logged alongside the trace; no simulated
quantity depends on it.

Quadrature is a midpoint rule on a uniform grid (nodes at multiples of 1/r)
clipped exactly by the polytope; clipped cells use their centroid as node.
All reductions use ``math.fsum`` so results do not depend on evaluation
order or worker count.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConfigError, DomainError, InputError, UnsupportedDimensionError
from .exact import Polynomial, format_polynomial
from .polytope import RationalPolytope


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class ConvexPotential:
    """``polynomial is None`` means the quadratic potential |u|^2 / 2."""

    n: int
    polynomial: Polynomial | None = None

    @classmethod
    def quadratic(cls, n: int) -> "ConvexPotential":
        return cls(n)

    @property
    def kind(self) -> str:
        return "quadratic" if self.polynomial is None else "polynomial"

    def describe(self) -> str:
        return "quadratic" if self.polynomial is None else format_polynomial(self.polynomial)

    def value(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.polynomial is None:
            return 0.5 * np.sum(points * points, axis=1)
        return self.polynomial.evaluate_array(points)

    def gradient(self, point: Sequence[float]) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        if self.polynomial is None:
            return p.copy()
        return np.array([self.polynomial.derivative(k).evaluate_array(p[None, :])[0]
                         for k in range(self.n)])

    def hessians(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.polynomial is None:
            return np.broadcast_to(np.eye(self.n), (points.shape[0], self.n, self.n)).copy()
        out = np.empty((points.shape[0], self.n, self.n))
        for i in range(self.n):
            di = self.polynomial.derivative(i)
            for j in range(i, self.n):
                out[:, i, j] = out[:, j, i] = di.derivative(j).evaluate_array(points)
        return out

    def is_strictly_convex_on(self, points: np.ndarray) -> bool:
        if self.polynomial is None:
            return True
        return bool(np.all(np.linalg.eigvalsh(self.hessians(points)) > 0))

    def bregman_array(self, points: np.ndarray, m: Sequence[float]) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        m = np.asarray(m, dtype=float)
        if self.polynomial is None:
            diff = points - m
            return 0.5 * np.sum(diff * diff, axis=1)
        b = (self.value(points) - self.value(m[None, :])[0]
             - (points - m) @ self.gradient(m))
        return np.maximum(b, 0.0)


def bregman(potential: ConvexPotential, u: Sequence[float], m: Sequence[float],
            domain: RationalPolytope | None = None) -> float:
    if domain is not None:
        for name, x in (("point", u), ("base point", m)):
            if not domain.contains([Fraction(c) for c in x]):
                raise DomainError(f"{name} {tuple(x)} lies outside the polytope")
    return float(potential.bregman_array(np.asarray(u, dtype=float)[None, :], m)[0])


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    polytope: RationalPolytope
    resolution: int
    nodes: np.ndarray
    weights: np.ndarray
    centers: np.ndarray

    @property
    def h(self) -> float:
        return 1.0 / self.resolution

    def total_measure(self) -> float:
        return math.fsum(self.weights)


def _clip_polygon(poly: list, a: Sequence[float], b: float) -> list:
    """Sutherland-Hodgman clip of a convex polygon by a . x <= b."""
    out = []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        fp = a[0] * p[0] + a[1] * p[1] - b
        fq = a[0] * q[0] + a[1] * q[1] - b
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            lam = fp / (fp - fq)
            out.append((p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1])))
    return out


def _area_centroid(poly: list) -> tuple[float, tuple]:
    twice, cx, cy = [], [], []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        cr = p[0] * q[1] - q[0] * p[1]
        twice.append(cr)
        cx.append((p[0] + q[0]) * cr)
        cy.append((p[1] + q[1]) * cr)
    a2 = math.fsum(twice)
    if a2 == 0:
        return 0.0, (0.0, 0.0)
    return abs(a2) / 2, (math.fsum(cx) / (3 * a2), math.fsum(cy) / (3 * a2))


def build_grid(P: RationalPolytope, resolution: int) -> QuadratureGrid:
    """Cells of width 1/resolution centred on (1/resolution) Z^n, clipped by P."""
    if resolution < 1:
        raise ConfigError("resolution must be a positive integer")
    if P.n > 2:
        raise UnsupportedDimensionError("quadrature is implemented for n <= 2")
    if P.dim != P.n:
        raise ConfigError("quadrature needs a full-dimensional polytope")
    r = resolution
    nodes, weights, centers = [], [], []
    if P.n == 1:
        lo, hi = P.vertices[0][0], P.vertices[-1][0]
        half = Fraction(1, 2 * r)
        for k in range(math.floor(lo * r) - 1, math.ceil(hi * r) + 2):
            a = max(lo, Fraction(k, r) - half)
            b = min(hi, Fraction(k, r) + half)
            if b > a:
                nodes.append(((a + b) / 2,))
                weights.append(b - a)
                centers.append((Fraction(k, r),))
        return QuadratureGrid(P, r, np.array(nodes, dtype=float), np.array(weights, dtype=float),
                              np.array(centers, dtype=float))

    (x0, y0), (x1, y1) = P.bounding_box()
    A = np.array([f.normal for f in P.facets], dtype=float)
    b = np.array([float(f.offset) for f in P.facets])
    h = 1.0 / r
    ii = np.arange(math.floor(x0 * r) - 1, math.ceil(x1 * r) + 2)
    jj = np.arange(math.floor(y0 * r) - 1, math.ceil(y1 * r) + 2)
    I, J = np.meshgrid(ii, jj, indexing="ij")
    cx, cy = I.ravel() * h, J.ravel() * h
    tol = 1e-12 * max(1.0, float(np.max(np.abs(b))))
    inside = np.ones(cx.shape, dtype=bool)
    outside = np.zeros(cx.shape, dtype=bool)
    for sx in (-0.5, 0.5):
        for sy in (-0.5, 0.5):
            px, py = cx + sx * h, cy + sy * h
            slack = b[None, :] - (np.outer(px, A[:, 0]) + np.outer(py, A[:, 1]))
            inside &= np.all(slack >= -tol, axis=1)
    # a cell is certainly outside if some facet excludes all four corners
    for k in range(len(b)):
        all_out = np.ones(cx.shape, dtype=bool)
        for sx in (-0.5, 0.5):
            for sy in (-0.5, 0.5):
                all_out &= (A[k, 0] * (cx + sx * h) + A[k, 1] * (cy + sy * h) - b[k]) >= -tol
        outside |= all_out
    for idx in range(cx.size):
        c = (cx[idx], cy[idx])
        if inside[idx]:
            nodes.append(c)
            weights.append(h * h)
            centers.append(c)
        elif not outside[idx]:
            poly = [(c[0] - h / 2, c[1] - h / 2), (c[0] + h / 2, c[1] - h / 2),
                    (c[0] + h / 2, c[1] + h / 2), (c[0] - h / 2, c[1] + h / 2)]
            for k in range(len(b)):
                poly = _clip_polygon(poly, A[k], b[k])
                if not poly:
                    break
            if len(poly) >= 3:
                area, cen = _area_centroid(poly)
                if area > 1e-14 * h * h:
                    nodes.append(cen)
                    weights.append(area)
                    centers.append(c)
    return QuadratureGrid(P, r, np.array(nodes), np.array(weights), np.array(centers))


# ---------------------------------------------------------------------------
# densities


def _log_fsum_exp(logs: np.ndarray) -> float:
    if logs.size == 0:
        return -math.inf
    mx = float(np.max(logs))
    if mx == -math.inf:
        return -math.inf
    return mx + math.log(math.fsum(np.exp(logs - mx)))


@dataclass(frozen=True, eq=False)
class SectionDensity:
    grid: QuadratureGrid
    potential: ConvexPotential
    m: tuple
    s: float
    log_values: np.ndarray
    log_normalizer: float

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def total(self) -> float:
        return math.fsum(self.values * self.grid.weights)

    def log_density_at(self, points: np.ndarray) -> np.ndarray:
        return -self.s * self.potential.bregman_array(points, self.m) - self.log_normalizer


def density(grid: QuadratureGrid, potential: ConvexPotential, m: Sequence, s: float) -> SectionDensity:
    if s < 0:
        raise ConfigError("deformation parameter s must be nonnegative")
    if not grid.polytope.contains([Fraction(x) for x in m]):
        raise DomainError(f"label {tuple(m)} lies outside the polytope")
    m = tuple(float(x) for x in m)
    b = potential.bregman_array(grid.nodes, m)
    logw = -s * b
    logZ = _log_fsum_exp(logw + np.log(grid.weights))
    return SectionDensity(grid, potential, m, float(s), logw - logZ, logZ)


def mass_outside(rho: SectionDensity, eta: float, subdivisions: int = 16) -> float:
    """Mass of rho outside the open ball of radius eta around its label.

    Cells straddling the sphere are subdivided and the density re-evaluated
    at sub-cell midpoints.
    """
    if eta <= 0:
        raise ConfigError("eta must be positive")
    grid = rho.grid
    n = grid.nodes.shape[1]
    h = grid.h
    m = np.asarray(rho.m)
    dc = np.sqrt(np.sum((grid.centers - m) ** 2, axis=1))
    reach = 0.5 * h * math.sqrt(n)
    logs = []
    full = dc >= eta + reach
    logs.append(rho.log_values[full] + np.log(grid.weights[full]))
    partial = np.nonzero(np.abs(dc - eta) < reach)[0]
    if partial.size:
        q = subdivisions
        offs = (np.arange(q) + 0.5) / q - 0.5
        sub = np.array(np.meshgrid(*([offs] * n), indexing="ij")).reshape(n, -1).T * h
        P = grid.polytope
        A = np.array([f.normal for f in P.facets], dtype=float)
        bb = np.array([float(f.offset) for f in P.facets])
        for i in partial:
            pts = grid.centers[i] + sub
            ok = np.all(pts @ A.T <= bb + 1e-12, axis=1)
            pts = pts[ok]
            if pts.shape[0] == 0:
                if np.sqrt(np.sum((grid.nodes[i] - m) ** 2)) >= eta:
                    logs.append(np.array([rho.log_values[i] + math.log(grid.weights[i])]))
                continue
            out = np.sqrt(np.sum((pts - m) ** 2, axis=1)) >= eta
            if np.any(out):
                w = grid.weights[i] / pts.shape[0]
                logs.append(rho.log_density_at(pts[out]) + math.log(w))
    total = _log_fsum_exp(np.concatenate(logs))
    return min(1.0, max(0.0, math.exp(total))) if total > -math.inf else 0.0


def weak_pairing(rho: SectionDensity, tau: Polynomial) -> float:
    """Integral of tau * rho; tends to tau(m) for interior m."""
    vals = tau.evaluate_array(rho.grid.nodes)
    return math.fsum(vals * rho.values * rho.grid.weights)


def affinity_matrix(densities: Sequence[SectionDensity]) -> np.ndarray:
    """Bhattacharyya affinities: integral of sqrt(rho_m * rho_m')."""
    if not densities:
        return np.zeros((0, 0))
    g, s = densities[0].grid, densities[0].s
    for r in densities:
        if r.grid is not g or r.s != s:
            raise ConfigError("affinity needs densities on one grid at one s")
    k = len(densities)
    A = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            v = math.fsum(np.exp(0.5 * (densities[i].log_values + densities[j].log_values))
                          * g.weights)
            A[i, j] = A[j, i] = min(1.0, v)
    return A


# ---------------------------------------------------------------------------
# schedule


@dataclass(frozen=True)
class Schedule:
    """Linear ramp 1 + (t0 - 1) s on [0, 1], then t0 / (1 + (s - 1)).

    Continuous at s = 1, strictly decreasing afterwards, and below 1/100
    once s > 100 t0 as long as t0 >= 1/100.
    """

    t0: float = 0.5

    def __post_init__(self):
        if not 0 < self.t0 <= 1:
            raise ConfigError(f"t0 must lie in (0, 1], got {self.t0}")

    def __call__(self, s: float) -> float:
        return schedule_t(self, s)


def schedule_t(sch: Schedule, s: float) -> float:
    if s < 0:
        raise ConfigError("s must be nonnegative")
    if s <= 1:
        return 1 + (sch.t0 - 1) * s
    return sch.t0 / (1 + (s - 1))


# ---------------------------------------------------------------------------
# sweeps


def geometric_sweep(start: float, factor: float, count: int) -> list:
    if start <= 0 or factor <= 1 or count < 1:
        raise ConfigError("sweep needs start > 0, factor > 1, count >= 1")
    return [start * factor ** k for k in range(count)]


@dataclass(frozen=True)
class S0Report:
    found: bool
    s0: float | None
    epsilon: float
    eta: float
    masses: dict
    last_s: float

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "eta": self.eta, "found": self.found,
                "s0": self.s0, "last_s": self.last_s,
                "masses": {",".join(map(str, k)): v for k, v in self.masses.items()}}


def interior_points(P: RationalPolytope, W0: Sequence) -> list:
    return [tuple(m) for m in W0 if P.classify(m) == "interior"]


def find_s0(grid: QuadratureGrid, potential: ConvexPotential, W0: Sequence, epsilon: float,
            eta: float, start: float = 1.0, factor: float = 2.0, cap: float = 2.0 ** 20) -> S0Report:
    """Smallest s on the sweep start * factor^k (<= cap) with all interior masses < epsilon."""
    if epsilon <= 0 or eta <= 0:
        raise ConfigError("epsilon and eta must be positive")
    inner = interior_points(grid.polytope, W0)
    if not inner:
        raise InputError("no interior points in W0")
    s = start
    masses: dict = {}
    last = start
    while s <= cap:
        masses = {m: mass_outside(density(grid, potential, m, s), eta) for m in inner}
        last = s
        if all(v < epsilon for v in masses.values()):
            return S0Report(True, s, epsilon, eta, masses, s)
        s *= factor
    return S0Report(False, None, epsilon, eta, masses, last)


@dataclass
class QuantizeConfig:
    sweep_start: float = 1.0
    sweep_factor: float = 2.0
    sweep_count: int = 11
    eta: float = 0.5
    epsilons: tuple = (1e-3,)
    resolution: int = 200
    potential: ConvexPotential | None = None
    tests: tuple = ()
    t0: float = 0.5
    cap: float = 2.0 ** 20
    threads: int = 1


@dataclass
class ConvergenceReport:
    n: int
    tests: tuple
    rows: list = field(default_factory=list)
    interior: tuple = ()
    boundary: tuple = ()
    monotone: dict = field(default_factory=dict)
    s0: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def header(self) -> list:
        return (["s", "t_of_s"] + [f"m{k + 1}" for k in range(self.n)]
                + ["location", "mass_outside"]
                + [f"pairing_tau_{k + 1}" for k in range(len(self.tests))] + ["max_affinity"])

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.header())
        for r in self.rows:
            pairings = [("" if p is None else repr(p)) for p in r["pairings"]]
            w.writerow([repr(r["s"]), repr(r["t"]), *r["m"], r["location"], repr(r["mass_outside"]),
                        *pairings, repr(r["max_affinity"])])
        return out.getvalue()

    def mass_trace(self, m: tuple) -> list:
        return [(r["s"], r["mass_outside"]) for r in self.rows if tuple(r["m"]) == tuple(m)]

    def pairing_trace(self, m: tuple, k: int = 0) -> list:
        return [(r["s"], r["pairings"][k]) for r in self.rows if tuple(r["m"]) == tuple(m)]

    def summary(self) -> dict:
        return {
            "interior": [list(m) for m in self.interior],
            "boundary": [list(m) for m in self.boundary],
            "tests": [format_polynomial(t) for t in self.tests],
            "monotone_mass": {",".join(map(str, k)): v for k, v in self.monotone.items()},
            "s0": [r.to_dict() for r in self.s0],
            "notes": list(self.notes),
        }


def _nonincreasing(values: Sequence[float]) -> bool:
    return all(b <= a * (1 + 1e-12) + 1e-300 for a, b in zip(values, values[1:]))


def convergence_run(P: RationalPolytope, W0: Sequence, config: QuantizeConfig) -> ConvergenceReport:
    """Trace of masses, pairings and affinities for every m in W0 along the sweep."""
    n = P.n
    potential = config.potential or ConvexPotential.quadratic(n)
    if potential.n != n:
        raise ConfigError(f"potential in {potential.n} variables, polytope in {n}")
    for tau in config.tests:
        if tau.nvars != n:
            raise ConfigError(f"test section {tau} is not in {n} variables")
    schedule = Schedule(config.t0)
    grid = build_grid(P, config.resolution)
    if not potential.is_strictly_convex_on(grid.nodes):
        raise ConfigError("potential is not strictly convex on the polytope")
    W0 = [tuple(m) for m in W0]
    inner = interior_points(P, W0)
    report = ConvergenceReport(n, tuple(config.tests), interior=tuple(inner),
                               boundary=tuple(m for m in W0 if m not in inner))
    if not inner:
        report.notes.append("no interior Bohr-Sommerfeld points: boundary support "
                            "diagnostics only, no pairing claims")
    if report.boundary:
        report.notes.append("boundary points get mass diagnostics only")
    report.notes.append("t_of_s is logged for reference; no simulated quantity depends on it")
    report.notes.append("densities are the exp(-s * Bregman) model on the moment polytope")

    sweep = geometric_sweep(config.sweep_start, config.sweep_factor, config.sweep_count)
    workers = max(1, int(config.threads))
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for s in sweep:
            def one(m, s=s):
                rho = density(grid, potential, m, s)
                mass = mass_outside(rho, config.eta)
                pairs = ([weak_pairing(rho, tau) for tau in config.tests] if m in inner
                         else [None] * len(config.tests))
                return rho, mass, pairs

            results = list(pool.map(one, W0)) if pool else [one(m) for m in W0]
            A = affinity_matrix([r[0] for r in results])
            off = A - np.eye(len(W0))
            max_aff = float(np.max(off)) if len(W0) > 1 else 0.0
            t = schedule_t(schedule, s)
            for m, (_, mass, pairs) in zip(W0, results):
                report.rows.append({"s": s, "t": t, "m": list(m),
                                    "location": "interior" if m in inner else "boundary",
                                    "mass_outside": mass, "pairings": pairs,
                                    "max_affinity": max_aff})
    finally:
        if pool:
            pool.shutdown()
    for m in W0:
        report.monotone[m] = _nonincreasing([v for _, v in report.mass_trace(m)])
    if inner:
        for eps in config.epsilons:
            report.s0.append(find_s0(grid, potential, inner, eps, config.eta,
                                     start=config.sweep_start, factor=config.sweep_factor,
                                     cap=config.cap))
    return report


def loglog_slope(s_values: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(s)."""
    x = np.log(np.asarray(s_values, dtype=float))
    y = np.log(np.abs(np.asarray(errors, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])
