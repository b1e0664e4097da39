"""Problem files: a small UTF-8 ``key = value`` format.

::

    # the cusp t -> [t^2 : t^3 : 1]
    n = 1
    order = lex
    generators = 1, u1^2, u1^3
    h = 1
    d = 1
    dmax = 6
    basis = 1: 1, 1: u1^2, 1: u1^3
    dim_h0 = 3

    [quantize]
    sweep = 1, 2, 11
    eta = 1/2
    epsilon = 1/1000
    resolution = 200
    potential = quadratic
    tests = u1
    t0 = 1/2

Lists are comma separated.  ``basis`` entries are ``degree: polynomial``
and default to the generators at degree 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import ParseError
from .exact import GroupOrder, Polynomial, format_polynomial, parse_polynomial
from .quantization import ConvexPotential, QuantizeConfig
from .semigroup import KhovanskiiBasis, SectionSpace
from .valuation import Valuation

MAIN_KEYS = ("name", "n", "order", "generators", "h", "d", "dmax", "basis", "dim_h0", "covector")
ALIASES = {"d_max": "dmax", "dim_H0": "dim_h0"}
QUANTIZE_KEYS = ("sweep", "eta", "epsilon", "resolution", "potential", "tests", "t0", "cap")


@dataclass
class Entry:
    value: str
    line: int
    column: int  # 0-based offset of value within the line

    def items(self) -> list:
        """Comma-separated pieces with their own column offsets."""
        out, start = [], 0
        for piece in self.value.split(","):
            stripped = piece.strip()
            lead = len(piece) - len(piece.lstrip())
            if not stripped:
                raise ParseError("empty list item", self.line, self.column + start + 1)
            out.append(Entry(stripped, self.line, self.column + start + lead))
            start += len(piece) + 1
        return out

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.line, self.column + 1)

    def integer(self) -> int:
        try:
            return int(self.value)
        except ValueError:
            raise self.error(f"expected an integer, got {self.value!r}") from None

    def rational(self) -> Fraction:
        try:
            return Fraction(self.value)
        except (ValueError, ZeroDivisionError):
            raise self.error(f"expected a number, got {self.value!r}") from None

    def polynomial(self, n: int) -> Polynomial:
        return parse_polynomial(self.value, n, line=self.line, column=self.column)


@dataclass
class ProblemFile:
    n: int
    generators: list
    order: GroupOrder = field(default_factory=GroupOrder)
    h: Polynomial | None = None
    d: int = 1
    dmax: int = 4
    basis: list | None = None
    dim_h0: int | None = None
    covector: tuple | None = None
    quantize: QuantizeConfig | None = None
    name: str = ""

    def valuation(self) -> Valuation:
        return Valuation(self.order, self.n, self.h or Polynomial.constant(self.n, 1))

    def space(self) -> SectionSpace:
        return SectionSpace(1, tuple(self.generators))

    def khovanskii_basis(self) -> KhovanskiiBasis:
        if self.basis is None:
            return KhovanskiiBasis(tuple((1, f) for f in self.generators))
        return KhovanskiiBasis(tuple(self.basis))

    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"name = {self.name}")
        lines += [f"n = {self.n}", f"order = {self.order.spec()}",
                  "generators = " + ", ".join(format_polynomial(f) for f in self.generators),
                  f"h = {format_polynomial(self.h or Polynomial.constant(self.n, 1))}",
                  f"d = {self.d}", f"dmax = {self.dmax}"]
        if self.basis is not None:
            lines.append("basis = " + ", ".join(f"{i}: {format_polynomial(f)}" for i, f in self.basis))
        if self.dim_h0 is not None:
            lines.append(f"dim_h0 = {self.dim_h0}")
        if self.covector is not None:
            lines.append("covector = " + ", ".join(str(x) for x in self.covector))
        q = self.quantize
        if q is not None:
            lines += ["", "[quantize]",
                      f"sweep = {_num(q.sweep_start)}, {_num(q.sweep_factor)}, {q.sweep_count}",
                      f"eta = {_num(q.eta)}",
                      "epsilon = " + ", ".join(_num(e) for e in q.epsilons),
                      f"resolution = {q.resolution}",
                      f"potential = {(q.potential.describe() if q.potential else 'quadratic')}"]
            if q.tests:
                lines.append("tests = " + ", ".join(format_polynomial(t) for t in q.tests))
            lines += [f"t0 = {_num(q.t0)}", f"cap = {_num(q.cap)}"]
        return "\n".join(lines) + "\n"


def _num(x: float) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _split(text: str) -> tuple[dict, dict, bool]:
    main: dict = {}
    quant: dict = {}
    has_quant = False
    section = main
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if stripped != "[quantize]":
                raise ParseError(f"unknown section {stripped!r}", lineno, line.index("[") + 1)
            if has_quant:
                raise ParseError("duplicate [quantize] section", lineno, 1)
            section, has_quant = quant, True
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        key = ALIASES.get(key, key)
        keycol = len(key_part) - len(key_part.lstrip()) + 1
        allowed = QUANTIZE_KEYS if section is quant else MAIN_KEYS
        if key not in allowed:
            raise ParseError(f"unknown key {key!r}", lineno, keycol)
        if key in section:
            raise ParseError(f"duplicate key {key!r}", lineno, keycol)
        value = value_part.strip()
        col = len(key_part) + 1 + (len(value_part) - len(value_part.lstrip()))
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno, col + 1)
        section[key] = Entry(value, lineno, col)
    return main, quant, has_quant


def parse_problem(text: str) -> ProblemFile:
    main, quant, has_quant = _split(text)
    for key in ("n", "generators"):
        if key not in main:
            raise ParseError(f"missing required key {key!r}")
    n = main["n"].integer()
    if n < 1:
        raise main["n"].error("n must be positive")
    order = GroupOrder()
    if "order" in main:
        try:
            order = GroupOrder.from_spec(main["order"].value)
        except (ParseError, ValueError) as exc:
            raise main["order"].error(str(exc)) from None
        if order.kind == "weighted" and len(order.weights) != n:
            raise main["order"].error(f"weight vector must have {n} entries")
    gens = [e.polynomial(n) for e in main["generators"].items()]
    for e, g in zip(main["generators"].items(), gens):
        if g.is_zero():
            raise e.error("generator is zero")
    h = main["h"].polynomial(n) if "h" in main else Polynomial.constant(n, 1)
    if h.is_zero():
        raise main["h"].error("reference section h must be nonzero")
    prob = ProblemFile(n=n, generators=gens, order=order, h=h)
    if "name" in main:
        prob.name = main["name"].value
    if "d" in main:
        prob.d = main["d"].integer()
        if prob.d < 1:
            raise main["d"].error("d must be positive")
    if "dmax" in main:
        prob.dmax = main["dmax"].integer()
        if prob.dmax < 1:
            raise main["dmax"].error("dmax must be positive")
    if "basis" in main:
        basis = []
        for e in main["basis"].items():
            if ":" not in e.value:
                raise e.error("basis entries look like 'degree: polynomial'")
            deg_text, poly_text = e.value.split(":", 1)
            try:
                deg = int(deg_text)
            except ValueError:
                raise e.error(f"bad degree {deg_text!r}") from None
            offset = len(deg_text) + 1 + (len(poly_text) - len(poly_text.lstrip()))
            f = parse_polynomial(poly_text.strip(), n, line=e.line, column=e.column + offset)
            if f.is_zero():
                raise e.error("basis element is zero")
            basis.append((deg, f))
        prob.basis = basis
    if "dim_h0" in main:
        prob.dim_h0 = main["dim_h0"].integer()
    if "covector" in main:
        items = main["covector"].items()
        if len(items) != n:
            raise main["covector"].error(f"covector must have {n} entries")
        prob.covector = tuple(e.integer() for e in items)
    if has_quant:
        prob.quantize = _parse_quantize(quant, n)
    return prob


def _parse_quantize(q: dict, n: int) -> QuantizeConfig:
    cfg = QuantizeConfig()
    if "sweep" in q:
        items = q["sweep"].items()
        if len(items) != 3:
            raise q["sweep"].error("sweep is 'start, factor, count'")
        cfg.sweep_start = float(items[0].rational())
        cfg.sweep_factor = float(items[1].rational())
        cfg.sweep_count = items[2].integer()
        if cfg.sweep_start <= 0 or cfg.sweep_factor <= 1 or cfg.sweep_count < 1:
            raise q["sweep"].error("sweep needs start > 0, factor > 1, count >= 1")
    if "eta" in q:
        cfg.eta = float(q["eta"].rational())
        if cfg.eta <= 0:
            raise q["eta"].error("eta must be positive")
    if "epsilon" in q:
        cfg.epsilons = tuple(float(e.rational()) for e in q["epsilon"].items())
        if any(e <= 0 for e in cfg.epsilons):
            raise q["epsilon"].error("epsilon must be positive")
    if "resolution" in q:
        cfg.resolution = q["resolution"].integer()
        if cfg.resolution < 1:
            raise q["resolution"].error("resolution must be positive")
    if "potential" in q:
        text = q["potential"].value
        if text != "quadratic":
            cfg.potential = ConvexPotential(n, q["potential"].polynomial(n))
    if "tests" in q:
        cfg.tests = tuple(e.polynomial(n) for e in q["tests"].items())
    else:
        cfg.tests = tuple(Polynomial.variable(n, k) for k in range(n))
    if "t0" in q:
        cfg.t0 = float(q["t0"].rational())
        if not 0 < cfg.t0 <= 1:
            raise q["t0"].error("t0 must lie in (0, 1]")
    if "cap" in q:
        cfg.cap = float(q["cap"].rational())
    return cfg


def load_problem(path: str | Path) -> ProblemFile:
    """Read a problem file; a bare fixture name (``cusp``) loads the bundled fixture."""
    p = Path(path)
    if not p.exists() and p.suffix == "" and "/" not in str(path):
        fixture = resources.files("okounkov") / "fixtures" / f"{path}.problem"
        if fixture.is_file():
            return parse_problem(fixture.read_text(encoding="utf-8"))
    return parse_problem(p.read_text(encoding="utf-8"))


def fixture_names() -> list:
    root = resources.files("okounkov") / "fixtures"
    return sorted(Path(str(e.name)).stem for e in root.iterdir() if e.name.endswith(".problem"))
