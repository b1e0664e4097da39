"""Exact rational polytopes in dimension <= 3, value cones, Newton-Okounkov
bodies and lattice-point enumeration.

Polytopes carry both representations.  Facets are stored as outward,
primitive integer normals with a rational offset (``normal . x <= offset``).
Lower-dimensional polytopes also carry affine equations
(``normal . x == offset``) whose normals have their first nonzero entry
positive.  Interior/boundary always refers to the relative interior.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations, product
from typing import Iterable, Sequence

from .errors import (DegenerateConeError, EmptySliceError, InputError, ParseError,
                     UnboundedPolytopeError, UnsupportedDimensionError)
from .exact import rational_str

MAX_DIM = 3


def _primitive(v: Sequence[int]) -> tuple:
    g = reduce(math.gcd, (abs(int(x)) for x in v), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(int(x) // g for x in v)


def _canonical_sign(v: tuple) -> tuple:
    first = next(x for x in v if x)
    return v if first > 0 else tuple(-x for x in v)


def _integer_vector(v: Sequence[Fraction]) -> tuple:
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(x).denominator for x in v), 1)
    return _primitive([Fraction(x) * den for x in v])


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _rref(rows: list) -> tuple[list, list]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    mat = [[Fraction(x) for x in r] for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        lead = mat[r][c]
        mat[r] = [x / lead for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def _nullspace(rows: list, n: int) -> list:
    """Canonical integer basis of {x : row . x = 0 for all rows}."""
    red, pivots = _rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(_canonical_sign(_integer_vector(x)))
    return basis


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


@dataclass(frozen=True, order=True)
class Facet:
    normal: tuple
    offset: Fraction

    def slack(self, x: Sequence) -> Fraction:
        return self.offset - _dot(self.normal, x)

    def to_dict(self) -> dict:
        return {"normal": list(self.normal), "offset": rational_str(self.offset)}


@dataclass(frozen=True)
class RationalPolytope:
    n: int
    vertices: tuple
    facets: tuple
    equations: tuple = ()

    @property
    def dim(self) -> int:
        if not self.vertices:
            return -1
        return self.n - len(self.equations)

    def contains(self, x: Sequence) -> bool:
        if len(x) != self.n:
            raise InputError(f"point has {len(x)} coordinates, polytope lives in Q^{self.n}")
        return (all(e.slack(x) == 0 for e in self.equations)
                and all(f.slack(x) >= 0 for f in self.facets))

    def classify(self, x: Sequence) -> str | None:
        """'interior', 'boundary', or None when outside."""
        if not self.contains(x):
            return None
        return "interior" if all(f.slack(x) > 0 for f in self.facets) else "boundary"

    def scaled(self, k) -> "RationalPolytope":
        k = Fraction(k)
        if k <= 0:
            raise InputError("scale factor must be positive")
        return RationalPolytope(
            self.n,
            tuple(tuple(k * c for c in v) for v in self.vertices),
            tuple(Facet(f.normal, k * f.offset) for f in self.facets),
            tuple(Facet(e.normal, k * e.offset) for e in self.equations),
        )

    def bounding_box(self) -> tuple[tuple, tuple]:
        if not self.vertices:
            raise UnboundedPolytopeError("polytope has no vertex representation")
        lo = tuple(min(v[i] for v in self.vertices) for i in range(self.n))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(self.n))
        return lo, hi

    def diameter(self) -> float:
        return max((math.dist([float(c) for c in a], [float(c) for c in b])
                    for a in self.vertices for b in self.vertices), default=0.0)

    def volume(self) -> Fraction:
        """Length or area of a full-dimensional polytope in Q^1 or Q^2."""
        if self.dim != self.n:
            raise InputError("volume is only defined here for full-dimensional polytopes")
        if self.n == 1:
            return self.vertices[-1][0] - self.vertices[0][0]
        if self.n == 2:
            vs = self.vertices
            twice = sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1]
                        for i in range(len(vs)))
            return abs(twice) / 2
        raise UnsupportedDimensionError("volume only implemented for n <= 2")

    def contains_polytope(self, other: "RationalPolytope") -> bool:
        return all(self.contains(v) for v in other.vertices)

    def cross_validate(self) -> list:
        """Problems found when comparing the V- and H-representations (empty if none)."""
        problems = []
        k = self.dim
        for v in self.vertices:
            if not self.contains(v):
                problems.append(f"vertex {v} violates the H-representation")
                continue
            tight = [f.normal for f in self.facets if f.slack(v) == 0]
            if k > 0 and len(tight) < k:
                problems.append(f"vertex {v} is tight on {len(tight)} < {k} facets")
        for f in self.facets:
            if not any(f.slack(v) == 0 for v in self.vertices):
                problems.append(f"facet {f} touches no vertex")
        return problems

    def to_text(self) -> str:
        def vec(v):
            return "[" + ", ".join(rational_str(c) for c in v) + "]"

        def fac(f):
            return ("{normal: [" + ", ".join(str(x) for x in f.normal) + "], offset: "
                    + rational_str(f.offset) + "}")

        parts = ["vertices: [" + ", ".join(vec(v) for v in self.vertices) + "]",
                 "facets: [" + ", ".join(fac(f) for f in self.facets) + "]"]
        if self.equations:
            parts.append("equations: [" + ", ".join(fac(e) for e in self.equations) + "]")
        return "{" + ", ".join(parts) + "}"

    def to_dict(self) -> dict:
        return {
            "vertices": [[rational_str(c) for c in v] for v in self.vertices],
            "facets": [f.to_dict() for f in self.facets],
            "equations": [e.to_dict() for e in self.equations],
        }

    @classmethod
    def from_text(cls, text: str) -> "RationalPolytope":
        quoted = re.sub(r"(-?\d+/\d+)", r'"\1"', text)
        quoted = re.sub(r"([A-Za-z_]+)\s*:", r'"\1":', quoted)
        try:
            data = json.loads(quoted)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed polytope block: {exc.msg}", 1, exc.colno) from exc
        vertices = tuple(tuple(Fraction(c) for c in v) for v in data["vertices"])
        facets = tuple(Facet(tuple(int(x) for x in f["normal"]), Fraction(f["offset"]))
                       for f in data["facets"])
        equations = tuple(Facet(tuple(int(x) for x in f["normal"]), Fraction(f["offset"]))
                          for f in data.get("equations", []))
        n = len(vertices[0]) if vertices else len(facets[0].normal)
        return cls(n, vertices, facets, equations)


# ---------------------------------------------------------------------------
# convex hull


def _hull_2d(points: list) -> list:
    """Andrew's monotone chain on integer points; CCW, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _outward(normal: tuple, base: tuple, inner: Iterable) -> tuple:
    """Orient ``normal`` so that all ``inner`` points satisfy normal.(x - base) <= 0."""
    for q in inner:
        s = _dot(normal, [a - b for a, b in zip(q, base)])
        if s > 0:
            return tuple(-x for x in normal)
        if s < 0:
            return normal
    return normal


def hull(points: Sequence[Sequence]) -> RationalPolytope:
    """Exact convex hull of rational points in Q^n, n <= 3."""
    pts = [tuple(Fraction(c) for c in p) for p in points]
    if not pts:
        raise InputError("convex hull of an empty set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise InputError("points of different dimensions")
    if n > MAX_DIM:
        raise UnsupportedDimensionError(f"exact hull supports n <= {MAX_DIM}, got n = {n}")
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for p in pts for c in p), 1)
    ipts = sorted({tuple(int(c * den) for c in p) for p in pts})
    p0 = ipts[0]
    dirs = [tuple(a - b for a, b in zip(p, p0)) for p in ipts[1:]]
    red, pivots = _rref(dirs)
    k = len(red)
    eq_normals = _nullspace(red, n) if k < n else []
    equations = [Facet(a, Fraction(_dot(a, p0))) for a in eq_normals]

    if k == 0:
        verts, facets = [p0], []
    elif k == 1:
        u = _canonical_sign(_integer_vector(red[0]))
        ts = [(_dot(u, p), p) for p in ipts]
        lo, hi = min(ts), max(ts)
        verts = [lo[1], hi[1]]
        facets = [Facet(u, Fraction(hi[0])), Facet(tuple(-x for x in u), Fraction(-lo[0]))]
    elif k == 2:
        a, b = pivots[0], pivots[1]
        proj = {}
        for p in ipts:
            proj.setdefault((p[a], p[b]), p)
        ring = [proj[q] for q in _hull_2d(list(proj))]
        verts = ring
        facets = []
        for i, p in enumerate(ring):
            q = ring[(i + 1) % len(ring)]
            e = tuple(y - x for x, y in zip(p, q))
            if n == 2:
                c = (e[1], -e[0])
            else:
                c = _cross(e, eq_normals[0])
            c = _primitive(_outward(c, p, ring))
            facets.append(Facet(c, Fraction(_dot(c, p))))
    else:
        planes = set()
        for p, q, r in combinations(ipts, 3):
            c = _cross(tuple(y - x for x, y in zip(p, q)), tuple(y - x for x, y in zip(p, r)))
            if not any(c):
                continue
            sides = {(_dot(c, s) > _dot(c, p)) - (_dot(c, s) < _dot(c, p)) for s in ipts}
            if 1 in sides and -1 in sides:
                continue
            c = _primitive(_outward(c, p, ipts))
            planes.add(Facet(c, Fraction(_dot(c, p))))
        facets = list(planes)
        verts = []
        for p in ipts:
            tight = [list(f.normal) for f in facets if f.slack(p) == 0]
            if len(_rref(tight)[0]) == 3:
                verts.append(p)

    scale = Fraction(1, den)
    return RationalPolytope(
        n,
        tuple(tuple(Fraction(c) * scale for c in v) for v in verts),
        tuple(sorted(Facet(f.normal, f.offset * scale) for f in facets)),
        tuple(Facet(e.normal, e.offset * scale) for e in equations),
    )


# ---------------------------------------------------------------------------
# cones and Newton-Okounkov bodies


@dataclass(frozen=True)
class RationalCone:
    """Cone in R x R^n given by primitive integer rays (level, v)."""

    rays: tuple

    @property
    def n(self) -> int:
        return len(self.rays[0]) - 1


def build_cone(levels: dict) -> RationalCone:
    """Cone over {(d, v) : v in S_d}, reduced to its extreme rays."""
    slice_points = [tuple(Fraction(c, d) for c in v)
                    for d, vals in sorted(levels.items()) if d > 0 for v in vals]
    if not slice_points:
        raise DegenerateConeError("all levels are empty; the cone is {0}")
    body = hull(slice_points)
    rays = []
    for v in body.vertices:
        q = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in v), 1)
        rays.append(_primitive([q] + [int(c * q) for c in v]))
    return RationalCone(tuple(sorted(rays)))


def okounkov_body(cone: RationalCone) -> RationalPolytope:
    """Level-1 slice of the cone, projected to R^n."""
    if not cone.rays or all(r[0] <= 0 for r in cone.rays):
        raise EmptySliceError("no ray with positive level: the level-1 slice is empty")
    if any(r[0] == 0 for r in cone.rays):
        raise UnboundedPolytopeError("a level-0 ray makes the level-1 slice unbounded")
    if any(r[0] < 0 for r in cone.rays):
        raise InputError("rays must have nonnegative level")
    body = hull([tuple(Fraction(c, r[0]) for c in r[1:]) for r in cone.rays])
    problems = body.cross_validate()
    if problems:
        raise AssertionError("V/H representations disagree: " + "; ".join(problems))
    return body


def body_from_levels(levels: dict) -> RationalPolytope:
    return okounkov_body(build_cone(levels))


# ---------------------------------------------------------------------------
# lattice points


@dataclass(frozen=True)
class LatticePointSet:
    points: tuple
    interior: frozenset
    boundary: frozenset

    @property
    def classification(self) -> dict:
        return {p: ("interior" if p in self.interior else "boundary") for p in self.points}

    def __len__(self) -> int:
        return len(self.points)


def lattice_points(P: RationalPolytope, d: int = 1) -> LatticePointSet:
    """(d * P) intersected with Z^n, classified into relative interior/boundary."""
    if d < 1:
        raise InputError("scale must be a positive integer")
    if not P.vertices:
        raise UnboundedPolytopeError("cannot enumerate lattice points without a bounded V-representation")
    Q = P.scaled(d)
    lo, hi = Q.bounding_box()
    ranges = [range(math.ceil(a), math.floor(b) + 1) for a, b in zip(lo, hi)]
    points, interior, boundary = [], set(), set()
    for p in product(*ranges):
        where = Q.classify(p)
        if where is None:
            continue
        points.append(p)
        (interior if where == "interior" else boundary).add(p)
    return LatticePointSet(tuple(points), frozenset(interior), frozenset(boundary))
