"""Lowest-term valuations with one-dimensional leaves.

The valuation of a Laurent polynomial is its order-minimal exponent.  This is
the valuation attached to an ordered coordinate system at a smooth point and
satisfies all three valuation axioms together with the one-dimensional-leaves
property.  Quotients ``f / h^k`` are never formed: their value is
``value(f) - k * value(h)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, InputError, UndefinedValueError
from .exact import LEX, GroupOrder, Polynomial, exp_add, exp_scale, exp_sub
from .linalg import smith_invariants


@dataclass(frozen=True, order=True)
class GradedValue:
    """``(k, v)`` in N x Z^n."""

    level: int
    value: tuple

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        object.__setattr__(self, "value", tuple(int(x) for x in self.value))

    def __add__(self, other: "GradedValue") -> "GradedValue":
        return GradedValue(self.level + other.level, exp_add(self.value, other.value))

    def as_tuple(self) -> tuple:
        return (self.level,) + self.value


@dataclass(frozen=True)
class Valuation:
    order: GroupOrder = LEX
    n: int = 1
    reference: Polynomial = field(default=None)

    def __post_init__(self):
        h = self.reference
        if h is None:
            h = Polynomial.constant(self.n, 1)
            object.__setattr__(self, "reference", h)
        if h.nvars != self.n:
            raise DimensionError(f"reference section lives in {h.nvars} variables, not {self.n}")
        if h.is_zero():
            raise InputError("reference section h must be nonzero")

    @property
    def reference_value(self) -> tuple:
        return value(self, self.reference)

    def leading(self, f: Polynomial) -> tuple:
        """(order-minimal exponent, its coefficient)."""
        if f.is_zero():
            raise UndefinedValueError("the valuation of 0 is undefined")
        exp = self.order.min(f.support())
        return exp, f.coefficient(exp)


def value(val: Valuation, f: Polynomial) -> tuple:
    if f.nvars != val.n:
        raise DimensionError(f"polynomial in {f.nvars} variables, valuation on Z^{val.n}")
    return val.leading(f)[0]


def graded_value(val: Valuation, f: Polynomial, k: int) -> GradedValue:
    if k < 0:
        raise ValueError("level must be nonnegative")
    return GradedValue(k, exp_sub(value(val, f), exp_scale(k, val.reference_value)))


@dataclass
class Echelon:
    """Basis of a subspace with pairwise distinct leading exponents.

    ``rows`` maps a leading exponent to a polynomial whose leading coefficient
    is 1.  ``sources`` records, per leading exponent, which input produced it.
    """

    valuation: Valuation
    rows: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)

    def reduce(self, f: Polynomial) -> Polynomial:
        while not f.is_zero():
            lead, c = self.valuation.leading(f)
            row = self.rows.get(lead)
            if row is None:
                return f
            f = f - row.scale(c)
        return f

    def insert(self, f: Polynomial, source=None) -> tuple | None:
        """Add ``f``; returns its new leading exponent, or None if dependent."""
        r = self.reduce(f)
        if r.is_zero():
            return None
        lead, c = self.valuation.leading(r)
        self.rows[lead] = r.scale(1 / Fraction(c))
        self.sources[lead] = source
        return lead

    def values(self) -> frozenset:
        return frozenset(self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def echelon(val: Valuation, polys: Sequence[Polynomial]) -> Echelon:
    """Triangularize by pivoting on order-minimal terms, in input order."""
    ech = Echelon(val)
    for i, f in enumerate(polys):
        if f.nvars != val.n:
            raise DimensionError(f"polynomial in {f.nvars} variables, valuation on Z^{val.n}")
        ech.insert(f, i)
    return ech


def value_image(val: Valuation, polys: Sequence[Polynomial]) -> frozenset:
    """All values taken by nonzero elements of ``span(polys)``.

    Distinct leading exponents of the echelon rows are exactly the value set:
    a combination of rows has value equal to the smallest leading exponent
    with a nonzero coefficient.
    """
    return echelon(val, polys).values()


@dataclass(frozen=True)
class LeavesReport:
    ok: bool
    witness: tuple | None = None
    constants: tuple = ()


def check_one_dim_leaves(val: Valuation, polys: Sequence[Polynomial]) -> LeavesReport:
    """For each equal-value pair, cancel the leading term and confirm the value rises.

    ``constants`` lists ``(i, j, c)`` for each pair checked.  A failing pair is
    returned as ``witness``.
    """
    if any(f.is_zero() for f in polys):
        raise InputError("one-dimensional leaves check needs nonzero elements")
    leads = [val.leading(f) for f in polys]
    constants = []
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            (ef, cf), (eg, cg) = leads[i], leads[j]
            if ef != eg:
                continue
            c = cg / cf
            diff = polys[j] - polys[i].scale(c)
            constants.append((i, j, c))
            if not diff.is_zero() and val.order.key(value(val, diff)) <= val.order.key(eg):
                return LeavesReport(False, (i, j), tuple(constants))
    return LeavesReport(True, None, tuple(constants))


def value_lattice(values, n: int) -> dict:
    """Diagnostic: the subgroup of Z^n generated by a set of values.

    Surjectivity of the valuation is not enforced; this reports the Smith
    invariants so a caller can see whether observed values span Z^n.
    """
    invariants = smith_invariants([tuple(v) for v in values], n)
    return {
        "rank": len(invariants),
        "invariants": invariants,
        "full": len(invariants) == n and all(x == 1 for x in invariants),
    }
