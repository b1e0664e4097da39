"""Exact rational arithmetic, exponent vectors, group orders and Laurent polynomials.

Coefficients are :class:`fractions.Fraction` (always reduced, positive
denominator, arbitrary precision).  Exponents are plain tuples of ints.
Polynomials are immutable sparse maps ``exponent -> Fraction`` in a fixed
number of variables ``u1..un``; negative exponents are allowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DimensionError, ParseError

Rational = Fraction
Exponent = tuple  # tuple[int, ...]

__all__ = [
    "Rational", "Exponent", "GroupOrder", "Polynomial", "LEX", "GRLEX",
    "compare", "poly_add", "poly_mul", "parse_polynomial", "format_polynomial",
    "rational_str", "parse_rational", "exp_add", "exp_sub", "exp_scale",
]


def rational_str(q) -> str:
    """Bit-exact ``p/q`` literal; integers keep the ``/1``."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational literal: {text!r}") from exc


def exp_add(a: Sequence[int], b: Sequence[int]) -> tuple:
    if len(a) != len(b):
        raise DimensionError(f"exponent lengths differ: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def exp_sub(a: Sequence[int], b: Sequence[int]) -> tuple:
    if len(a) != len(b):
        raise DimensionError(f"exponent lengths differ: {len(a)} vs {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def exp_scale(k: int, a: Sequence[int]) -> tuple:
    return tuple(k * x for x in a)


# ---------------------------------------------------------------------------
# group orders


@dataclass(frozen=True)
class GroupOrder:
    """A translation-invariant total order on Z^n.

    ``kind`` is one of ``"lex"``, ``"grlex"`` (total degree, then lex) or
    ``"weighted"`` (``<weights, a>``, then lex).
    """

    kind: str = "lex"
    weights: tuple = ()

    def __post_init__(self):
        if self.kind not in ("lex", "grlex", "weighted"):
            raise ValueError(f"unknown order kind {self.kind!r}")
        if self.kind == "weighted" and not self.weights:
            raise ValueError("weighted order needs a weight vector")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    def key(self, a: Sequence[int]) -> tuple:
        a = tuple(a)
        if self.kind == "lex":
            return a
        if self.kind == "grlex":
            return (sum(a),) + a
        if len(self.weights) != len(a):
            raise DimensionError(
                f"weight vector has length {len(self.weights)}, exponent has {len(a)}")
        return (sum(w * x for w, x in zip(self.weights, a)),) + a

    def min(self, exponents: Iterable[Sequence[int]]) -> tuple:
        return min((tuple(e) for e in exponents), key=self.key)

    def sorted(self, exponents: Iterable[Sequence[int]]) -> list:
        return sorted((tuple(e) for e in exponents), key=self.key)

    def spec(self) -> str:
        if self.kind == "weighted":
            return "weighted " + ",".join(str(w) for w in self.weights)
        return self.kind

    @classmethod
    def from_spec(cls, text: str) -> "GroupOrder":
        parts = text.strip().split(None, 1)
        if not parts:
            raise ParseError("empty order specification")
        kind = parts[0].lower()
        if kind in ("lex", "grlex"):
            if len(parts) > 1:
                raise ParseError(f"order {kind} takes no parameters")
            return cls(kind)
        if kind == "weighted":
            if len(parts) < 2:
                raise ParseError("weighted order needs a weight vector")
            try:
                weights = tuple(int(w) for w in parts[1].replace(",", " ").split())
            except ValueError as exc:
                raise ParseError(f"bad weight vector {parts[1]!r}") from exc
            return cls("weighted", weights)
        raise ParseError(f"unknown order {parts[0]!r}")


LEX = GroupOrder("lex")
GRLEX = GroupOrder("grlex")


def compare(order: GroupOrder, a: Sequence[int], b: Sequence[int]) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    if len(a) != len(b):
        raise DimensionError(f"cannot compare exponents of length {len(a)} and {len(b)}")
    ka, kb = order.key(a), order.key(b)
    return (ka > kb) - (ka < kb)


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse Laurent polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 0:
            raise DimensionError("number of variables must be nonnegative")
        clean = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise DimensionError(f"exponent {exp} does not have {nvars} entries")
            c = Fraction(coeff)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self.nvars = nvars
        self._terms = clean
        self._hash = None

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c=1) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "Polynomial":
        exponent = tuple(exponent)
        return cls(len(exponent), {exponent: coeff})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): 1})

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Polynomial":
        return parse_polynomial(text, nvars)

    # inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple]:
        return iter(sorted(self._terms.items()))

    def support(self) -> list:
        return sorted(self._terms)

    def coefficient(self, exponent: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"

    def __str__(self) -> str:
        return format_polynomial(self)

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError(
                    f"polynomials in {self.nvars} and {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            s = out.get(exp, Fraction(0)) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial(self.nvars)
        return Polynomial(self.nvars, {e: c * v for e, v in self._terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials can be raised to negative powers")
            (exp, c), = self._terms.items()
            return Polynomial(self.nvars, {tuple(k * e for e in exp): c ** k})
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self, index: int) -> "Polynomial":
        out = {}
        for exp, c in self._terms.items():
            if exp[index]:
                new = list(exp)
                new[index] -= 1
                out[tuple(new)] = c * exp[index]
        return Polynomial(self.nvars, out)

    # evaluation ---------------------------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational point."""
        if len(point) != self.nvars:
            raise DimensionError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [Fraction(x) for x in point]
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for x, e in zip(pt, exp):
                if e:
                    if not x and e < 0:
                        raise ZeroDivisionError("negative power of a zero coordinate")
                    term *= x ** e
            total += term
        return total

    def evaluate_array(self, points: np.ndarray) -> np.ndarray:
        """Float values at the rows of an ``(N, n)`` array."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.nvars:
            raise DimensionError(f"expected an (N, {self.nvars}) array")
        out = np.zeros(points.shape[0])
        for exp, c in sorted(self._terms.items()):
            term = np.full(points.shape[0], float(c))
            for k, e in enumerate(exp):
                if e:
                    term = term * points[:, k] ** e
            out = out + term
        return out


def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    return f + g


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


# ---------------------------------------------------------------------------
# text syntax: ``3/2*u1^2*u2^-1 - u2 + 7``


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_term(exp: tuple, c: Fraction) -> str:
    factors = []
    for k, e in enumerate(exp):
        if e == 1:
            factors.append(f"u{k + 1}")
        elif e:
            factors.append(f"u{k + 1}^{e}")
    mag = abs(c)
    if not factors:
        return _format_coeff(mag)
    if mag == 1:
        return "*".join(factors)
    return _format_coeff(mag) + "*" + "*".join(factors)


def format_polynomial(f: Polynomial) -> str:
    """Canonical text form; terms in increasing lex order of exponents."""
    if f.is_zero():
        return "0"
    pieces = []
    for i, (exp, c) in enumerate(f.items()):
        body = _format_term(exp, c)
        if i == 0:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


class _Scanner:
    def __init__(self, text: str, nvars: int, line: int | None, col0: int):
        self.text = text
        self.pos = 0
        self.nvars = nvars
        self.line = line
        self.col0 = col0

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.line, self.col0 + self.pos + 1)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def digits(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return self.text[start:self.pos]

    def signed_int(self) -> int:
        self.skip()
        sign = 1
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        d = self.digits()
        if not d:
            raise self.error("expected an integer exponent")
        return sign * int(d)

    def factor(self):
        ch = self.peek()
        if ch.isdigit():
            num = self.digits()
            if self.pos < len(self.text) and self.text[self.pos] == "/":
                self.pos += 1
                den = self.digits()
                if not den:
                    raise self.error("expected a denominator")
                if int(den) == 0:
                    raise self.error("zero denominator")
                return Fraction(int(num), int(den)), None
            return Fraction(int(num)), None
        if ch == "u":
            self.pos += 1
            idx = self.digits()
            if not idx:
                raise self.error("expected a variable index after 'u'")
            k = int(idx)
            if not 1 <= k <= self.nvars:
                raise self.error(f"variable u{k} out of range u1..u{self.nvars}")
            e = 1
            if self.peek() == "^":
                self.pos += 1
                e = self.signed_int()
            return None, (k - 1, e)
        if ch == "(":
            raise self.error("parentheses are not supported")
        raise self.error(f"unexpected {ch!r}" if ch else "unexpected end of input")

    def term(self):
        coeff = Fraction(1)
        exp = [0] * self.nvars
        while True:
            c, v = self.factor()
            if c is not None:
                coeff *= c
            else:
                exp[v[0]] += v[1]
            if self.peek() == "*":
                self.pos += 1
                continue
            return tuple(exp), coeff


def parse_polynomial(text: str, nvars: int, *, line: int | None = None,
                     column: int = 0) -> Polynomial:
    """Parse the ``u1..un`` text syntax; ``line``/``column`` locate errors in a file."""
    sc = _Scanner(text, nvars, line, column)
    if not sc.peek():
        raise sc.error("empty polynomial")
    terms: dict = {}
    first = True
    while True:
        ch = sc.peek()
        sign = 1
        if ch and ch in "+-":
            sign = -1 if ch == "-" else 1
            sc.pos += 1
            nxt = sc.peek()
            if nxt and nxt in "+-":
                sign *= -1 if nxt == "-" else 1
                sc.pos += 1
        elif not first:
            raise sc.error(f"expected '+' or '-', got {ch!r}")
        exp, coeff = sc.term()
        terms[exp] = terms.get(exp, Fraction(0)) + sign * coeff
        first = False
        if not sc.peek():
            break
    return Polynomial(nvars, terms)
