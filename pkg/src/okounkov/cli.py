"""Command line entry point: ``okounkov <command> --input FILE``.

Exit status is 0 on success, 2 for malformed input or configuration and 3
when a mathematical precondition fails (for example a Khovanskii check).
Reports go to stdout as JSON; ``--out DIR`` also writes them to files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .degeneration import (build_degeneration, degeneration_report, special_fiber,
                           verify_hypotheses)
from .errors import InputError, KhovanskiiViolation, OkounkovError, ParseError, PreconditionError
from .exact import format_polynomial, rational_str
from .polytope import body_from_levels, lattice_points
from .problem import ProblemFile, load_problem
from .quantization import convergence_run
from .semigroup import (build_semigroup, finite_generation_probe, khovanskii_check, level_space,
                        levels_csv)

COMMANDS = ("body", "semigroup", "khovanskii", "degenerate", "verify", "quantize")


def _levels_json(levels: dict) -> dict:
    return {str(d): [list(v) for v in sorted(levels[d])] for d in sorted(levels)}


def _segment(body) -> str | None:
    if body.n != 1 or body.dim != 1:
        return None
    lo, hi = sorted(v[0] for v in body.vertices)
    return f"[{rational_str(lo)}, {rational_str(hi)}]"


def run_body(prob: ProblemFile, args) -> tuple[dict, dict]:
    val, E = prob.valuation(), prob.space()
    sg = build_semigroup(val, E, args.dmax, workers=args.threads)
    body = body_from_levels(sg.levels)
    pts = lattice_points(body, args.d)
    saturation = {}
    for d, S in sorted(sg.levels.items()):
        lp = lattice_points(body, d)
        saturation[str(d)] = {"values": len(S), "lattice_points": len(lp),
                              "saturated": set(S) == set(lp.points)}
    report = {
        "command": "body", "problem": prob.name, "dmax": args.dmax,
        "body": body.to_dict(), "body_text": body.to_text(), "dim": body.dim,
        "lattice_points": {"scale": args.d, "points": [list(p) for p in pts.points],
                           "interior": [list(p) for p in sorted(pts.interior)],
                           "boundary": [list(p) for p in sorted(pts.boundary)]},
        "saturation": saturation,
        "note": "body is the hull of S_1..S_dmax rescaled; it can only grow with dmax",
    }
    seg = _segment(body)
    if seg is not None:
        report["segment"] = seg
    return report, {"body.txt": body.to_text() + "\n"}


def run_semigroup(prob: ProblemFile, args) -> tuple[dict, dict]:
    val, E = prob.valuation(), prob.space()
    sg = build_semigroup(val, E, args.dmax, workers=args.threads)
    report = {
        "command": "semigroup", "problem": prob.name, "dmax": args.dmax,
        "levels": _levels_json(sg.levels),
        "dims": {str(d): level_space(E, d).dim for d in sorted(sg.levels)},
        "generators": [[g.level, list(g.value)] for g in sg.generators],
        "additivity_violations": [list(p) for p in sg.additivity_violations()],
    }
    if args.dmax >= 2:
        probe = finite_generation_probe(val, E, args.dmax)
        report["probe"] = {"d_star": probe.d_star, "stabilized": probe.stabilized,
                           "conclusive": probe.conclusive, "note": probe.note}
    return report, {"levels.csv": levels_csv(sg.levels)}


def run_khovanskii(prob: ProblemFile, args) -> tuple[dict, dict]:
    val, E, B = prob.valuation(), prob.space(), prob.khovanskii_basis()
    rep = khovanskii_check(B, val, E, args.dmax)
    report = {
        "command": "khovanskii", "problem": prob.name, "dmax": args.dmax,
        "passed": rep.passed, "first_failing_level": rep.first_failing_level,
        "missing": [list(v) for v in rep.missing],
        "outside_ring": [[i, s] for i, s in rep.outside_ring],
        "basis_conditions": {str(k): v for k, v in rep.basis_conditions.items()},
        "basis": [{"degree": i, "section": format_polynomial(f),
                   "value": list(g.value)} for (i, f), g in zip(B.elements, B.values(val))],
    }
    if not rep.passed:
        raise _Fail(report, "Khovanskii check failed"
                    + (f" at level {rep.first_failing_level}" if rep.first_failing_level else
                       ": basis elements outside the section ring"))
    return report, {}


def _degeneration(prob: ProblemFile, args):
    return build_degeneration(prob.valuation(), prob.space(), prob.khovanskii_basis(), args.d,
                              covector=prob.covector)


def run_degenerate(prob: ProblemFile, args) -> tuple[dict, dict]:
    spec = _degeneration(prob, args)
    report = {"command": "degenerate", "problem": prob.name}
    report.update(degeneration_report(spec, prob.dim_h0))
    return report, {}


def run_verify(prob: ProblemFile, args) -> tuple[dict, dict]:
    spec = _degeneration(prob, args)
    hyp = verify_hypotheses(spec, prob.dim_h0)
    report = {"command": "verify", "problem": prob.name, "d": args.d,
              "hypotheses": {k: r.to_dict() for k, r in hyp.results.items()}}
    return report, {}


def run_quantize(prob: ProblemFile, args) -> tuple[dict, dict]:
    if prob.quantize is None:
        raise InputError("problem file has no [quantize] section")
    cfg = prob.quantize
    if args.resolution is not None:
        cfg.resolution = args.resolution
    cfg.threads = args.threads
    spec = _degeneration(prob, args)
    delta0 = special_fiber(spec).delta0
    run = convergence_run(delta0, spec.values, cfg)
    report = {"command": "quantize", "problem": prob.name, "d": args.d,
              "resolution": cfg.resolution, "delta0": delta0.to_dict(),
              "W0": [list(m) for m in spec.values]}
    report.update(run.summary())
    return report, {"trace.csv": run.to_csv()}


RUNNERS = {"body": run_body, "semigroup": run_semigroup, "khovanskii": run_khovanskii,
           "degenerate": run_degenerate, "verify": run_verify, "quantize": run_quantize}


class _Fail(Exception):
    """A completed run whose outcome is a failed precondition."""

    def __init__(self, report: dict, message: str):
        super().__init__(message)
        self.report = report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="okounkov",
                                description="Value semigroups, Newton-Okounkov bodies, "
                                            "toric degenerations and a quantization model.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True,
                   help="problem file, or the name of a bundled fixture (e.g. cusp)")
    p.add_argument("--d", type=int, default=None, help="level d (default: from the file)")
    p.add_argument("--dmax", type=int, default=None, help="highest level (default: from the file)")
    p.add_argument("--out", default=None, help="directory for report.json and data files")
    p.add_argument("--resolution", type=int, default=None, help="quadrature resolution override")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    return p


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def _write(out: str | None, report: dict, files: dict) -> None:
    if out is None:
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "report.json").write_text(_dump(report) + "\n", encoding="utf-8")
    for name, text in files.items():
        (d / name).write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        prob = load_problem(args.input)
        if args.d is None:
            args.d = prob.d
        if args.dmax is None:
            args.dmax = prob.dmax
        if args.d < 1 or args.dmax < 1:
            raise InputError("--d and --dmax must be positive")
        if args.threads < 1:
            raise InputError("--threads must be positive")
        if args.resolution is not None and args.resolution < 1:
            raise InputError("--resolution must be positive")
        report, files = RUNNERS[args.command](prob, args)
    except _Fail as exc:
        _write(args.out, exc.report, {})
        print(_dump(exc.report))
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ParseError as exc:
        print(f"error: {args.input}:{exc}", file=sys.stderr)
        return 2
    except KhovanskiiViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OkounkovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _write(args.out, report, files)
    print(_dump(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
