"""Levelwise value semigroups S_d, Khovanskii-basis verification and
finite-generation probing for a presented section space E."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from .errors import InputError
from .exact import Polynomial, exp_add, exp_scale, exp_sub
from .linalg import in_span, polynomial_rank
from .valuation import GradedValue, Valuation, echelon, graded_value


@dataclass(frozen=True)
class SectionSpace:
    """A basis of E^d, stored as polynomial representatives."""

    level: int
    basis: tuple

    def __post_init__(self):
        basis = tuple(self.basis)
        object.__setattr__(self, "basis", basis)
        if self.level < 0:
            raise InputError("level must be nonnegative")
        if any(f.is_zero() for f in basis):
            raise InputError("section space basis contains 0")
        if len({f.nvars for f in basis}) > 1:
            raise InputError("basis polynomials have different numbers of variables")
        if polynomial_rank(basis) != len(basis):
            raise InputError("section space basis is linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def nvars(self) -> int:
        return self.basis[0].nvars


def level_space(E: SectionSpace, d: int) -> SectionSpace:
    """Basis of E^d drawn from the d-fold products of the level-1 basis.

    Products are enumerated as multisets in a fixed order; a product is kept
    when it is independent of those kept before it.
    """
    if d == 0:
        return SectionSpace(0, (Polynomial.constant(E.nvars, 1),))
    if d == 1:
        return SectionSpace(1, E.basis)
    # any valuation works for the independence test; lex is used for determinism
    ech = echelon(Valuation(n=E.nvars), [])
    kept = []
    for combo in combinations_with_replacement(range(E.dim), d):
        prod = Polynomial.constant(E.nvars, 1)
        for i in combo:
            prod = prod * E.basis[i]
        if ech.insert(prod) is not None:
            kept.append(prod)
    return SectionSpace(d, tuple(kept))


def level_values(val: Valuation, E_d: SectionSpace) -> frozenset:
    """S_d: values of E^d shifted by -d * value(h)."""
    shift = exp_scale(E_d.level, val.reference_value)
    return frozenset(exp_sub(v, shift) for v in echelon(val, E_d.basis).values())


def semigroup_generated(gens: Sequence[GradedValue], d: int) -> frozenset:
    """Values v with (d, v) a finite sum of the generators."""
    gens = list(gens)
    if d < 0:
        raise ValueError("level must be nonnegative")
    if not gens:
        return frozenset()
    if any(g.level < 1 for g in gens):
        raise InputError("generator levels must be positive")
    n = len(gens[0].value)
    reach = [{(0,) * n}] + [set() for _ in range(d)]
    for level in range(1, d + 1):
        for g in gens:
            if g.level <= level:
                for v in reach[level - g.level]:
                    reach[level].add(exp_add(v, g.value))
    return frozenset(reach[d])


@dataclass
class ValueSemigroup:
    levels: dict = field(default_factory=dict)
    generators: list = field(default_factory=list)

    def additivity_violations(self) -> list:
        """Pairs (d, e) with S_d + S_e not contained in S_{d+e}."""
        bad = []
        for d in sorted(self.levels):
            for e in sorted(self.levels):
                if e < d or d + e not in self.levels:
                    continue
                target = self.levels[d + e]
                if any(exp_add(a, b) not in target
                       for a in self.levels[d] for b in self.levels[e]):
                    bad.append((d, e))
        return bad

    def graded(self) -> list:
        return [GradedValue(d, v) for d in sorted(self.levels) for v in sorted(self.levels[d])]


def build_semigroup(val: Valuation, E: SectionSpace, d_max: int, workers: int = 1) -> ValueSemigroup:
    """S_1..S_{d_max}; levels are independent and merged by level index."""
    def one(d):
        return d, level_values(val, level_space(E, d))

    ds = range(1, d_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ds))
    else:
        results = [one(d) for d in ds]
    sg = ValueSemigroup(levels=dict(results))
    sg.generators = minimal_generators(sg.levels)
    return sg


def minimal_generators(levels: dict) -> list:
    """Elements of the stored levels not generated by lower levels."""
    gens: list = []
    for d in sorted(levels):
        reached = semigroup_generated(gens, d) if gens else frozenset()
        for v in sorted(levels[d]):
            if v not in reached:
                gens.append(GradedValue(d, v))
    return gens


def levels_csv(levels: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    n = len(next(iter(v for lv in levels.values() for v in lv), ()))
    writer.writerow(["d"] + [f"v{k + 1}" for k in range(n)])
    for d in sorted(levels):
        for v in sorted(levels[d]):
            writer.writerow([d, *v])
    return out.getvalue()


# ---------------------------------------------------------------------------
# Khovanskii bases


@dataclass(frozen=True)
class KhovanskiiBasis:
    """Candidate homogeneous generators f_ij, given as (degree, polynomial)."""

    elements: tuple

    def __post_init__(self):
        elems = tuple((int(i), f) for i, f in self.elements)
        object.__setattr__(self, "elements", elems)
        for i, f in elems:
            if i < 1:
                raise InputError("Khovanskii basis degrees must be positive")
            if f.is_zero():
                raise InputError("Khovanskii basis contains 0")
        for i in self.degrees:
            group = self.of_degree(i)
            if polynomial_rank(group) != len(group):
                raise InputError(f"degree-{i} elements are linearly dependent")

    @classmethod
    def from_space(cls, E: SectionSpace) -> "KhovanskiiBasis":
        return cls(tuple((1, f) for f in E.basis))

    @property
    def degrees(self) -> list:
        return sorted({i for i, _ in self.elements})

    def of_degree(self, i: int) -> list:
        return [f for deg, f in self.elements if deg == i]

    def labels(self) -> list:
        """(i, j) labels in element order, j counted from 1 within each degree."""
        seen: dict = {}
        out = []
        for i, _ in self.elements:
            seen[i] = seen.get(i, 0) + 1
            out.append((i, seen[i]))
        return out

    def values(self, val: Valuation) -> list:
        return [graded_value(val, f, i) for i, f in self.elements]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class KhovanskiiReport:
    passed: bool
    first_failing_level: int | None
    missing: tuple
    d_max: int
    outside_ring: tuple = ()
    basis_conditions: dict = field(default_factory=dict)


def khovanskii_check(B: KhovanskiiBasis, val: Valuation, E: SectionSpace, d_max: int) -> KhovanskiiReport:
    """Check that the values of B generate S_d for every d <= d_max.

    ``E`` is the presented level-1 section space; S_d is computed from it.
    Also records elements of B lying outside E^i and, per degree, whether
    the degree-i elements form a basis of E^i.
    """
    gens = B.values(val)
    outside = []
    conditions = {}
    for i in B.degrees:
        Ei = level_space(E, i)
        group = B.of_degree(i)
        for f in group:
            if not in_span(Ei.basis, f):
                outside.append((i, str(f)))
        conditions[i] = len(group) == Ei.dim and all(in_span(Ei.basis, f) for f in group)
    for d in range(1, d_max + 1):
        target = level_values(val, level_space(E, d))
        reached = semigroup_generated(gens, d)
        missing = sorted(target - reached)
        if missing:
            return KhovanskiiReport(False, d, tuple(missing), d_max, tuple(outside), conditions)
    return KhovanskiiReport(not outside, None, (), d_max, tuple(outside), conditions)


@dataclass(frozen=True)
class GenerationProbe:
    d_star: int
    d_max: int
    stabilized: bool
    generators: tuple
    conclusive: bool = False
    note: str = ("heuristic: stabilization observed only up to d_max; "
                 "finite generation cannot be decided from finitely many levels")


def finite_generation_probe(val: Valuation, E: SectionSpace, d_max: int) -> GenerationProbe:
    """Smallest d* whose levels <= d* generate every S_d with d* < d <= d_max."""
    if d_max < 2:
        raise InputError("finite generation probe needs d_max >= 2")
    levels = {d: level_values(val, level_space(E, d)) for d in range(1, d_max + 1)}
    for d_star in range(1, d_max + 1):
        gens = [GradedValue(d, v) for d in range(1, d_star + 1) for v in levels[d]]
        if all(semigroup_generated(gens, d) >= levels[d] for d in range(d_star + 1, d_max + 1)):
            low = {d: levels[d] for d in range(1, d_star + 1)}
            return GenerationProbe(d_star, d_max, d_star < d_max,
                                   tuple(minimal_generators(low)))
    raise AssertionError("unreachable: d* = d_max always qualifies")
