"""Command-line front end.

Exit status: 0 success with every inequality satisfied, 1 usage or domain
error, 2 a hypothesis could not be certified, 3 a certified bound was
violated (the report then carries a ``reproduction`` block). Reports go to
stdout (or ``--output``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .analysis import DEFAULT_PARAMS_GRID, SWEEP_COLUMNS, fuzz, optimal_x, sweep_x
from .catalog import CATALOG, FAMILIES, GeneratorConfig, lookup
from .errors import HHError
from .exprlang import Expression, parse
from .hhbounds import HYPOTHESIS_OF, NEW_THEOREMS, NOT_CERTIFIED, THEOREMS, ExponentParams, reduction_check, verify
from .numerics import Interval

EXIT_OK, EXIT_USAGE, EXIT_UNCERTIFIED, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Serialization


def _json_float(v: float) -> str:
    if not math.isfinite(v):
        return "null"
    text = format(v, ".17g")
    # Keep floats recognizable as floats: 2.0 prints as "2.0", not "2".
    return text if any(c in text for c in ".en") else text + ".0"


def dumps_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits; key order preserved."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _json_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps_json(str(k))}: {dumps_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps_json(v) for v in obj) + "]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps_json(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Argument handling


def _common(
    p: argparse.ArgumentParser,
    *,
    function: bool = True,
    exponents: bool = True,
    fmt: Sequence[str] = ("json", "text"),
) -> None:
    if function:
        p.add_argument("--f", required=True, help='expression in x, or "catalog:<name>"')
        p.add_argument("--a", type=float, default=None, help="left endpoint (catalog default if omitted)")
        p.add_argument("--b", type=float, default=None, help="right endpoint (catalog default if omitted)")
    if exponents:
        p.add_argument("--p", type=float, default=2.0, help="Hoelder exponent, > 1")
        p.add_argument("--q", type=float, default=2.0, help="power-mean exponent, >= 1")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    p.add_argument("--format", choices=fmt, default=fmt[0])
    p.add_argument("--output", type=Path, default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hhverify", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hhverify {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="check every bound at one point x")
    _common(p)
    p.add_argument("--x", type=float, default=None, help="evaluation point, default (a+b)/2")

    p = sub.add_parser("sweep", help="tabulate bounds and slacks over an x grid")
    _common(p, fmt=("csv", "json", "text"))
    p.add_argument("--n", type=int, default=101)

    p = sub.add_parser("optimize", help="search the bound-minimizing x (exploratory)")
    _common(p)
    p.add_argument("--theorem", choices=(*NEW_THEOREMS, "all"), default="all")

    p = sub.add_parser("reduce", help="midpoint reductions to the earlier bounds")
    _common(p)

    p = sub.add_parser("fuzz", help="verify bounds on seeded random admissible functions")
    _common(p, function=False, exponents=False)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--family", choices=(*FAMILIES, "all"), default="all")

    p = sub.add_parser("catalog", help="list built-in functions")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--output", type=Path, default=None)
    return parser


def _resolve_function(args: argparse.Namespace) -> tuple[Expression, Interval, str]:
    src = args.f
    if src.startswith("catalog:"):
        entry = lookup(src)
        a = entry.interval.a if args.a is None else args.a
        b = entry.interval.b if args.b is None else args.b
        return entry.expression, Interval(a, b), entry.label
    if args.a is None or args.b is None:
        raise UsageError("--a and --b are required for expression input")
    iv = Interval(args.a, args.b)
    return parse(src), iv, src


def _validate(args: argparse.Namespace) -> None:
    if getattr(args, "tol", 1.0) <= 0:
        raise UsageError("--tol must be positive")
    if hasattr(args, "p"):
        ExponentParams(args.p, args.q)
    if getattr(args, "n", 2) < 2:
        raise UsageError("--n must be at least 2")
    if getattr(args, "trials", 1) < 1:
        raise UsageError("--trials must be at least 1")
    if not 0 <= getattr(args, "seed", 0) < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")


# ---------------------------------------------------------------------------
# Commands


def _verify_text(d: dict[str, Any]) -> str:
    lines = [
        f"function  {d['function']}",
        f"interval  [{d['interval']['a']!r}, {d['interval']['b']!r}]   x = {d['x']!r}",
        f"params    p = {d['params']['p']!r}, q = {d['params']['q']!r}",
        f"lhs       {d['lhs']!r}   (trapezoid deviation {d['lhs_trapezoid']!r})",
        f"identity residual {d['lemma1_residual']:.3e}   quadrature error {d['quadrature_error']:.3e}",
        "",
        f"{'bound':<6} {'rhs':>24} {'slack':>24}  status",
    ]
    for t in THEOREMS:
        lines.append(f"{t:<6} {d['bounds'][t]!r:>24} {d['slacks'][t]!r:>24}  {d['status'][t]}")
    lines.append("")
    for k, v in d["hypotheses"].items():
        lines.append(f"{k}: holds={v['holds']} margin={v['margin']!r}")
    c = d["classic_hh"]
    lines.append(f"classic ordering {c['midpoint_value']!r} <= {c['mean_value']!r} <= {c['endpoint_mean']!r}: "
                 f"{'holds' if c['holds'] else 'fails'}")
    lines.append(f"outcome: {d['outcome']}")
    return "\n".join(lines) + "\n"


def _exit_for(violation: bool, uncertified: bool) -> int:
    if violation:
        return EXIT_VIOLATION
    return EXIT_UNCERTIFIED if uncertified else EXIT_OK


def cmd_verify(args: argparse.Namespace) -> tuple[str, int]:
    f, iv, label = _resolve_function(args)
    if args.x is not None and not iv.contains(args.x):
        raise UsageError("require a <= x <= b")
    report = verify(f, iv, args.x, ExponentParams(args.p, args.q), args.tol, label=label)
    d = report.to_dict("verify")
    code = _exit_for(bool(report.violations), bool(report.uncertified))
    return (dumps_json(d) + "\n" if args.format == "json" else _verify_text(d)), code


def cmd_sweep(args: argparse.Namespace) -> tuple[str, int]:
    f, iv, label = _resolve_function(args)
    table = sweep_x(f, iv, args.n, ExponentParams(args.p, args.q), args.tol, label=label)
    allowance = 1e-9 + table.quadrature_error
    violation = uncertified = False
    for name, thm in zip(("slack6", "slack7", "slack8"), NEW_THEOREMS):
        certified = table.hypotheses[HYPOTHESIS_OF[thm]].holds
        uncertified |= not certified
        violation |= certified and table.min_slack(name)[1] < -allowance
    code = _exit_for(violation, uncertified)
    if args.format == "csv":
        return table.to_csv(), code
    if args.format == "json":
        return dumps_json(table.to_dict()) + "\n", code
    lines = ["  ".join(f"{c:>22}" for c in SWEEP_COLUMNS)]
    lines += ["  ".join(f"{v!r:>22}" for v in row) for row in table.rows]
    return "\n".join(lines) + "\n", code


def cmd_optimize(args: argparse.Namespace) -> tuple[str, int]:
    f, iv, label = _resolve_function(args)
    params = ExponentParams(args.p, args.q)
    which = NEW_THEOREMS if args.theorem == "all" else (args.theorem,)
    results = [optimal_x(f, iv, t, params, args.tol).to_dict() for t in which]
    d = {
        "command": "optimize",
        "exploratory": True,
        "function": label,
        "interval": {"a": iv.a, "b": iv.b},
        "params": {"p": params.p, "q": params.q},
        "results": results,
        "tool_version": __version__,
    }
    if args.format == "json":
        return dumps_json(d) + "\n", EXIT_OK
    lines = [f"exploratory search over x for {label} on [{iv.a!r}, {iv.b!r}]"]
    for r in results:
        lines.append(f"{r['theorem']}: argmin {r['argmin']!r}  min {r['min_value']!r}  "
                     f"midpoint {r['midpoint_value']!r}")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> tuple[str, int]:
    f, iv, label = _resolve_function(args)
    params = ExponentParams(args.p, args.q)
    pairs = reduction_check(f, iv, params)
    ok = all(p.passed for p in pairs)
    d = {
        "command": "reduce",
        "function": label,
        "interval": {"a": iv.a, "b": iv.b},
        "x": iv.midpoint,
        "params": {"p": params.p, "q": params.q},
        "tolerance": 1e-12,
        "pairs": [p.to_dict() for p in pairs],
        "passed": ok,
        "tool_version": __version__,
    }
    code = EXIT_OK if ok else EXIT_VIOLATION
    if args.format == "json":
        return dumps_json(d) + "\n", code
    lines = [f"{p.theorem} = {p.theorem_value!r}   {p.baseline} = {p.baseline_value!r}   "
             f"rel diff {p.relative_difference:.3e}   {'pass' if p.passed else 'FAIL'}" for p in pairs]
    return "\n".join(lines) + "\n", code


def cmd_fuzz(args: argparse.Namespace) -> tuple[str, int]:
    family = None if args.family == "all" else args.family
    config = GeneratorConfig(args.seed, family, Interval(args.a, args.b))
    grid = DEFAULT_PARAMS_GRID
    summary = fuzz(config, args.trials, grid, args.tol)
    d = summary.to_dict()
    d["params_grid"] = [{"p": g.p, "q": g.q} for g in grid]
    d["tool_version"] = __version__
    code = _exit_for(summary.violations > 0, summary.hypothesis_failures > 0)
    if args.format == "json":
        return dumps_json(d) + "\n", code
    lines = [
        f"trials {summary.trials}  seed {summary.seed}",
        f"violations {summary.violations}  hypothesis failures {summary.hypothesis_failures}  "
        f"errors {summary.errors}",
    ]
    lines += [f"min slack {t}: {s!r}" for t, s in summary.min_slack.items()]
    return "\n".join(lines) + "\n", code


def cmd_catalog(args: argparse.Namespace) -> tuple[str, int]:
    entries = [
        {
            "id": e.label,
            "expression": e.source,
            "interval": {"a": e.interval.a, "b": e.interval.b},
            "description": e.description,
            "convex": e.convex,
            "derivative_abs_quasiconvex": e.derivative_quasiconvex,
            "foil": e.foil,
        }
        for e in CATALOG.values()
    ]
    if args.format == "json":
        return dumps_json({"command": "catalog", "functions": entries}) + "\n", EXIT_OK
    lines = [f"{'id':<18} {'expression':<14} {'interval':<14} {'convex':<7} {'|df| qc':<9} note"]
    for e in entries:
        iv = f"[{e['interval']['a']:g}, {e['interval']['b']:g}]"
        note = ("FOIL: " if e["foil"] else "") + e["description"]
        lines.append(f"{e['id']:<18} {e['expression']:<14} {iv:<14} {str(e['convex']).lower():<7} "
                     f"{str(e['derivative_abs_quasiconvex']).lower():<9} {note}")
    return "\n".join(lines) + "\n", EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "reduce": cmd_reduce,
    "fuzz": cmd_fuzz,
    "catalog": cmd_catalog,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one command; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HHError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.output is not None:
        try:
            args.output.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    if code == EXIT_UNCERTIFIED:
        print(f"note: some hypotheses were {NOT_CERTIFIED}", file=sys.stderr)
    elif code == EXIT_VIOLATION:
        print("error: bound violation; see the reproduction data in the report", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
