"""Exact value semigroups and Newton-Okounkov bodies for projective varieties
presented by Laurent polynomial sections, toric degeneration data and a
numerical model of section concentration on the special fiber."""

from .degeneration import (DegenerationSpec, build_degeneration, degeneration_report,
                           special_fiber, verify_hypotheses)
from .errors import (ConfigError, DomainError, InputError, KhovanskiiViolation, OkounkovError,
                     ParseError, PreconditionError)
from .exact import GroupOrder, Polynomial, format_polynomial, parse_polynomial
from .polytope import RationalPolytope, body_from_levels, build_cone, hull, lattice_points, okounkov_body
from .problem import ProblemFile, load_problem, parse_problem
from .quantization import ConvexPotential, QuantizeConfig, build_grid, convergence_run, density
from .semigroup import (KhovanskiiBasis, SectionSpace, build_semigroup, khovanskii_check,
                        level_space, level_values)
from .valuation import GradedValue, Valuation, graded_value, value, value_image

__all__ = [
    "ConfigError", "ConvexPotential", "DegenerationSpec", "DomainError", "GradedValue",
    "GroupOrder", "InputError", "KhovanskiiBasis", "KhovanskiiViolation", "OkounkovError",
    "ParseError", "Polynomial", "PreconditionError", "ProblemFile", "QuantizeConfig",
    "RationalPolytope", "SectionSpace", "Valuation", "body_from_levels", "build_cone",
    "build_degeneration", "build_grid", "build_semigroup", "convergence_run",
    "degeneration_report", "density", "format_polynomial", "graded_value", "hull",
    "khovanskii_check", "lattice_points", "level_space", "level_values", "load_problem",
    "okounkov_body", "parse_polynomial", "parse_problem", "special_fiber",
    "value", "value_image", "verify_hypotheses",
]
