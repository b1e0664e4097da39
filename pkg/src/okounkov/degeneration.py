"""Explicit toric degeneration data built from a Khovanskii basis.

For a degree d the coordinates of the family embedding are indexed by S_d;
the coordinate for s is ``t^(weight) * prod f_ij^alpha_ij`` for a fixed
monomial lift alpha of s.  The special fiber is the torus orbit closure with
weight s on coordinate s, so W_0 = S_d and Delta_0 = conv(S_d).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import BaseLocusError, InputError, KhovanskiiViolation
from .exact import Polynomial, exp_add, exp_scale, exp_sub, format_polynomial
from .linalg import smith_invariants
from .polytope import LatticePointSet, RationalPolytope, hull, lattice_points
from .semigroup import (KhovanskiiBasis, SectionSpace, khovanskii_check, level_space,
                        level_values)
from .valuation import Valuation, graded_value, value


@dataclass(frozen=True)
class MonomialLift:
    value: tuple
    alpha: tuple
    labels: tuple
    degree: int

    def as_map(self) -> dict:
        return {lab: a for lab, a in zip(self.labels, self.alpha) if a}

    def section(self, B: KhovanskiiBasis) -> Polynomial:
        f = Polynomial.constant(B.elements[0][1].nvars, 1)
        for (_, g), a in zip(B.elements, self.alpha):
            if a:
                f = f * g ** a
        return f

    def formula(self) -> str:
        parts = []
        for (i, j), a in zip(self.labels, self.alpha):
            if a == 1:
                parts.append(f"f{i}_{j}")
            elif a:
                parts.append(f"f{i}_{j}^{a}")
        return "*".join(parts) if parts else "1"


def _compositions(degrees: Sequence[int], d: int):
    """All alpha >= 0 with sum(degrees[k] * alpha[k]) == d, in increasing lex order."""
    m = len(degrees)
    # feasible[k][r]: can positions k.. reach exactly r
    feasible = [[False] * (d + 1) for _ in range(m + 1)]
    feasible[m][0] = True
    for k in range(m - 1, -1, -1):
        for r in range(d + 1):
            feasible[k][r] = any(feasible[k + 1][r - a * degrees[k]]
                                 for a in range(r // degrees[k] + 1))
    prefix: list = []

    def rec(k, r):
        if k == m:
            yield tuple(prefix)
            return
        for a in range(r // degrees[k] + 1):
            if feasible[k + 1][r - a * degrees[k]]:
                prefix.append(a)
                yield from rec(k + 1, r - a * degrees[k])
                prefix.pop()

    if d >= 0 and feasible[0][d]:
        yield from rec(0, d)


def choose_monomial_lifts(B: KhovanskiiBasis, val: Valuation, d: int,
                          E: SectionSpace | None = None) -> list:
    """One monomial in the f_ij of degree d per s in S_d.

    Among all monomials with value s the lexicographically smallest exponent
    vector (in basis order) is chosen.  S_d comes from ``E`` when given and
    otherwise from the values of B.
    """
    values = B.values(val)
    degrees = [i for i, _ in B.elements]
    n = val.n
    best: dict = {}
    for alpha in _compositions(degrees, d):
        s = (0,) * n
        for a, gv in zip(alpha, values):
            if a:
                s = exp_add(s, exp_scale(a, gv.value))
        if s not in best:
            best[s] = alpha
    target = level_values(val, level_space(E, d)) if E is not None else frozenset(best)
    missing = sorted(target - set(best))
    if missing:
        raise KhovanskiiViolation(
            f"value(s) {', '.join(map(str, missing))} at level {d} are not reached by "
            f"monomials in the Khovanskii basis", level=d, missing=missing)
    labels = tuple(B.labels())
    return [MonomialLift(s, best[s], labels, d) for s in sorted(target)]


def default_covector(B: KhovanskiiBasis, val: Valuation, degree: int = 1) -> tuple:
    """A covector e making the t -> 0 limit pick out leading terms.

    ``e = -(N * primary + (M^(n-1), ..., M, 1))`` where ``primary`` is the
    order's grading vector (zero for lex).  M exceeds every coordinate of the
    non-leading term offsets in B and the value spread at ``degree``, so
    ``<e, .>`` reverses the group order on all relevant differences and
    separates distinct values of S_degree.
    """
    n = val.n
    bound = 0
    for (i, f), gv in zip(B.elements, B.values(val)):
        lead = value(val, f)
        for beta in f.support():
            bound = max(bound, *(abs(x) for x in exp_sub(beta, lead)))
        bound = max(bound, *(abs(x) for x in gv.value))
    M = 2 * max(degree, 1) * bound + 1
    lexpart = [M ** (n - 1 - k) for k in range(n)]
    kind = val.order.kind
    if kind == "lex":
        primary = [0] * n
    elif kind == "grlex":
        primary = [1] * n
    else:
        primary = list(val.order.weights)
    N = sum(lexpart) * M * max(degree, 1) * max(bound, 1) + 1
    return tuple(-(N * p + q) for p, q in zip(primary, lexpart))


def assign_weights(B: KhovanskiiBasis, val: Valuation, covector: Sequence[int] | None = None,
                   degree: int = 1) -> dict:
    """w_ij = <e, value(f_ij / h^i)> keyed by label (i, j)."""
    e = tuple(covector) if covector is not None else default_covector(B, val, degree)
    if len(e) != val.n:
        raise InputError(f"covector has {len(e)} entries, expected {val.n}")
    return {lab: sum(a * b for a, b in zip(e, gv.value))
            for lab, gv in zip(B.labels(), B.values(val))}


@dataclass(frozen=True)
class DegenerationSpec:
    valuation: Valuation
    space: SectionSpace
    basis: KhovanskiiBasis
    d: int
    values: tuple
    lifts: tuple
    weights: dict
    covector: tuple
    dim_Ed: int

    def coordinate_weight(self, lift: MonomialLift) -> int:
        return sum(self.weights[lab] * a for lab, a in zip(lift.labels, lift.alpha))

    def sections(self) -> list:
        return [lift.section(self.basis) for lift in self.lifts]


def build_degeneration(val: Valuation, E: SectionSpace, B: KhovanskiiBasis, d: int,
                       covector: Sequence[int] | None = None) -> DegenerationSpec:
    if d < 1:
        raise InputError("degree d must be positive")
    report = khovanskii_check(B, val, E, d)
    if report.first_failing_level is not None:
        raise KhovanskiiViolation(
            f"Khovanskii check fails at level {report.first_failing_level}: missing "
            + ", ".join(map(str, report.missing)),
            level=report.first_failing_level, missing=report.missing)
    if report.outside_ring:
        raise KhovanskiiViolation(
            "Khovanskii basis elements outside the section ring: "
            + ", ".join(f"degree {i}: {f}" for i, f in report.outside_ring))
    lifts = choose_monomial_lifts(B, val, d, E)
    e = tuple(covector) if covector is not None else default_covector(B, val, d)
    weights = assign_weights(B, val, e)
    return DegenerationSpec(val, E, B, d, tuple(l.value for l in lifts), tuple(lifts),
                            weights, e, level_space(E, d).dim)


@dataclass(frozen=True)
class FamilyCoordinate:
    label: tuple
    weight: int
    formula: str
    section: Polynomial


def family_coordinates(spec: DegenerationSpec) -> list:
    out = []
    for lift in spec.lifts:
        w = spec.coordinate_weight(lift)
        mono = lift.formula()
        formula = mono if w == 0 else f"t^{w}*{mono}"
        out.append(FamilyCoordinate(lift.value, w, formula, lift.section(spec.basis)))
    return out


def evaluate_family(spec: DegenerationSpec, x: Sequence, t) -> tuple:
    """Exact projective coordinates of (x, t) under the family embedding."""
    t = Fraction(t)
    if t == 0:
        raise InputError("the embedding is defined for t != 0; use limit_at_zero")
    coords = tuple(t ** c.weight * c.section.evaluate(x) for c in family_coordinates(spec))
    if not any(coords):
        raise BaseLocusError(f"all coordinates vanish at {tuple(x)}")
    return coords


def limit_at_zero(spec: DegenerationSpec, x: Sequence) -> tuple:
    """t -> 0 limit of the family point over a fixed x.

    Returns ``(surviving labels, limit vector)``: after dividing by the
    smallest power of t present, only coordinates of minimal weight survive.
    """
    coords = family_coordinates(spec)
    vals = [c.section.evaluate(x) for c in coords]
    live = [c.weight for c, v in zip(coords, vals) if v]
    if not live:
        raise BaseLocusError(f"all coordinates vanish at {tuple(x)}")
    w0 = min(live)
    vec = tuple(v if v and c.weight == w0 else Fraction(0) for c, v in zip(coords, vals))
    return tuple(c.label for c, v in zip(coords, vec) if v), vec


def orbit_limit(spec: DegenerationSpec) -> tuple:
    """Limit of the family along u = t^(-e) as t -> 0, leading coefficients divided out.

    Returns ``(vector, offenders)``; the vector is all ones exactly when every
    coordinate's lowest t-power comes from the leading term of its section.
    """
    c = tuple(-x for x in spec.covector)
    per_coord = []
    for coord in family_coordinates(spec):
        lead, lc = spec.valuation.leading(coord.section)
        powers: dict = {}
        for beta, coef in coord.section.items():
            p = coord.weight + sum(a * b for a, b in zip(c, beta))
            powers[p] = powers.get(p, Fraction(0)) + coef
        powers = {p: v for p, v in powers.items() if v}
        per_coord.append((coord.label, powers, lc))
    floor = min(min(p) for _, p, _ in per_coord)
    vec = tuple(p.get(floor, Fraction(0)) / lc for _, p, lc in per_coord)
    offenders = tuple(lab for (lab, _, _), v in zip(per_coord, vec) if v != 1)
    return vec, offenders


@dataclass(frozen=True)
class BohrSommerfeldSet:
    W0: LatticePointSet
    delta0: RationalPolytope
    delta0_points: LatticePointSet
    iota: tuple
    torus_weights: tuple

    @property
    def strict_inclusion(self) -> bool:
        return set(self.W0.points) < set(self.delta0_points.points)


def special_fiber(spec: DegenerationSpec) -> BohrSommerfeldSet:
    """W_0 as the image of the lattice points of the simplex Delta_P under iota*."""
    N = len(spec.values)
    n = spec.valuation.n
    iota = tuple(spec.values)  # iota*(e_s) = s
    simplex_points = [tuple(int(k == i) for k in range(N)) for i in range(N)]
    W0_pts = sorted({tuple(sum(e[i] * iota[i][j] for i in range(N)) for j in range(n))
                     for e in simplex_points})
    delta0 = hull(W0_pts)
    interior = frozenset(p for p in W0_pts if delta0.classify(p) == "interior")
    W0 = LatticePointSet(tuple(W0_pts), interior, frozenset(W0_pts) - interior)
    weights = tuple((lift.value, spec.coordinate_weight(lift)) for lift in spec.lifts)
    return BohrSommerfeldSet(W0, delta0, lattice_points(delta0, 1), iota, weights)


@dataclass(frozen=True)
class HypothesisResult:
    status: str  # "pass", "fail" or "assumed"
    detail: str

    def to_dict(self) -> dict:
        return {"status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class HypothesisReport:
    results: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> HypothesisResult:
        return self.results[key]

    def table(self) -> dict:
        return {k: r.status for k, r in self.results.items()}


def verify_hypotheses(spec: DegenerationSpec, dim_H0: int | None = None) -> HypothesisReport:
    fiber = special_fiber(spec)
    n = spec.valuation.n
    results = {}

    vec, offenders = orbit_limit(spec)
    weights_ok = sorted(s for s, _ in fiber.torus_weights) == sorted(fiber.W0.points)
    if not offenders and weights_ok:
        results["e"] = HypothesisResult(
            "pass", "coordinates indexed by S_d with torus weight s; "
                    f"limit along u = t^(-e), e = {list(spec.covector)}, is [1:...:1]")
    else:
        results["e"] = HypothesisResult(
            "fail", f"limit along u = t^(-e) is not [1:...:1] at coordinates {list(offenders)}"
                    if offenders else "torus weights do not match S_d")

    if dim_H0 is None:
        results["f"] = HypothesisResult(
            "assumed", "surjectivity of H0(P, L_P) -> H0(X, L^d) needs E^d = H0(X, L^d); "
                       "supply dim_h0 to check")
    elif dim_H0 == spec.dim_Ed:
        results["f"] = HypothesisResult(
            "pass", f"dim H0 = {dim_H0} = dim E^d, so coordinates restrict onto H0")
    else:
        results["f"] = HypothesisResult(
            "fail", f"dim H0 = {dim_H0} but dim E^d = {spec.dim_Ed}")

    pts = fiber.W0.points
    diffs = [exp_sub(p, pts[0]) for p in pts[1:]]
    inv = smith_invariants(diffs, n)
    full = len(inv) == n and all(x == 1 for x in inv)
    elem_inv = smith_invariants(list(pts), n)
    results["g"] = HypothesisResult(
        "pass" if full else "fail",
        f"differences of S_d have Smith invariants {inv} in Z^{n}; "
        f"elements of S_d have invariants {elem_inv}")

    h_ok = spec.dim_Ed == len(pts) and (dim_H0 is None or dim_H0 == len(pts))
    msg = f"dim E^d = {spec.dim_Ed}, |W0| = {len(pts)}"
    if dim_H0 is not None:
        msg += f", dim H0 = {dim_H0}"
    results["h"] = HypothesisResult("pass" if h_ok else "fail", msg)
    return HypothesisReport(results)


def degeneration_report(spec: DegenerationSpec, dim_H0: int | None = None) -> dict:
    fiber = special_fiber(spec)
    hyp = verify_hypotheses(spec, dim_H0)
    coords = family_coordinates(spec)
    by_weight: dict = {}
    for c in coords:
        by_weight.setdefault(c.weight, []).append(list(c.label))
    collisions = [v for v in by_weight.values() if len(v) > 1]
    return {
        "d": spec.d,
        "S_d": [list(s) for s in spec.values],
        "dim_E_d": spec.dim_Ed,
        "basis": [{"label": f"f{i}_{j}", "degree": i, "section": format_polynomial(f)}
                  for (i, j), (_, f) in zip(spec.basis.labels(), spec.basis.elements)],
        "covector": list(spec.covector),
        "weights": {f"f{i}_{j}": w for (i, j), w in spec.weights.items()},
        "lifts": [{"value": list(l.value),
                   "alpha": {f"f{i}_{j}": a for (i, j), a in l.as_map().items()}}
                  for l in spec.lifts],
        "coordinates": [{"value": list(c.label), "weight": c.weight, "formula": c.formula,
                         "section": format_polynomial(c.section)} for c in coords],
        "weight_collisions": collisions,
        "W0": [list(p) for p in fiber.W0.points],
        "W0_interior": [list(p) for p in sorted(fiber.W0.interior)],
        "W0_boundary": [list(p) for p in sorted(fiber.W0.boundary)],
        "delta0": fiber.delta0.to_dict(),
        "delta0_lattice_points": [list(p) for p in fiber.delta0_points.points],
        "W0_strictly_inside_lattice_points": fiber.strict_inclusion,
        "hypotheses": {k: r.to_dict() for k, r in hyp.results.items()},
    }


def distinct_graded_values(spec: DegenerationSpec) -> bool:
    """Coordinate sections have pairwise distinct graded values, hence are independent."""
    vals = [graded_value(spec.valuation, f, spec.d) for f in spec.sections()]
    return len(set(vals)) == len(vals)


__all__ = [
    "MonomialLift", "DegenerationSpec", "BohrSommerfeldSet", "FamilyCoordinate",
    "HypothesisResult", "HypothesisReport", "choose_monomial_lifts", "assign_weights",
    "default_covector", "build_degeneration", "family_coordinates", "evaluate_family",
    "limit_at_zero", "orbit_limit", "special_fiber", "verify_hypotheses",
    "degeneration_report", "distinct_graded_values",
]
