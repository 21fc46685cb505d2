"""Command-line front end.

Exit codes: 0 success, 1 config error, 2 resolution or usage error,
3 domain error, 4 check failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .algebra import render_element
from .config import ProjectConfig, load_config
from .errors import ConfigError, DomainError, UnknownSuite, WeilcError
from .expr import eval_weil, to_string
from .oracle import run_suite
from .poisson import bracket
from .prolongation import APoint, apply_field
from . import __version__

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RESOLVE = 2
EXIT_DOMAIN = 3
EXIT_CHECK_FAILED = 4


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _add_shared_flags(p: argparse.ArgumentParser, with_suite_knobs: bool = False):
    # also accepted after the subcommand; SUPPRESS keeps a top-level value
    # from being overwritten when the flag is absent there
    p.add_argument("--json", metavar="PATH", default=argparse.SUPPRESS,
                   help="write a machine-readable report")
    if with_suite_knobs:
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--trials", type=int, default=argparse.SUPPRESS)
        p.add_argument("--tol", type=float, default=argparse.SUPPRESS)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weilc",
        description="Evaluate prolonged functions and run identity check suites.",
    )
    parser.add_argument("--version", action="version", version=f"weilc {__version__}")
    parser.add_argument(
        "--config",
        help="project config path (falls back to the WEILC_CONFIG variable)",
    )
    parser.add_argument("--seed", type=int, help="override the configured suite seed")
    parser.add_argument("--trials", type=int, help="override the configured trials")
    parser.add_argument("--tol", type=float, help="override the configured tolerance")
    parser.add_argument("--json", metavar="PATH", help="write a machine-readable report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra-show", help="print basis, height, and products")
    p.add_argument("name")
    _add_shared_flags(p)

    p = sub.add_parser("eval", help="evaluate a named expression at an algebra point")
    p.add_argument("expression")
    p.add_argument("algebra")
    p.add_argument(
        "--point",
        required=True,
        help="JSON list of per-coordinate coefficient vectors in basis order",
    )
    _add_shared_flags(p)

    p = sub.add_parser("bracket", help="Poisson bracket of two named expressions")
    p.add_argument("bivector")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--algebra", help="evaluate the prolonged bracket over this algebra")
    p.add_argument("--point", help="JSON point (required with --algebra)")
    _add_shared_flags(p)

    p = sub.add_parser("prolong", help="apply a prolonged field to a prolonged function")
    p.add_argument("field")
    p.add_argument("expression")
    p.add_argument("--algebra", required=True)
    p.add_argument("--point", required=True)
    _add_shared_flags(p)

    p = sub.add_parser("check", help="run a registered check suite")
    p.add_argument("suite")
    p.add_argument("--pi", help="bivector name, for suites that take one")
    p.add_argument("--algebra", help="algebra name, for suites that take one")
    _add_shared_flags(p, with_suite_knobs=True)
    return parser


def _load(args) -> ProjectConfig:
    path = args.config or os.environ.get("WEILC_CONFIG")
    if not path:
        raise ConfigError("no config given (use --config or WEILC_CONFIG)")
    return load_config(path)


def _resolve(table: dict, name: str, what: str):
    if name not in table:
        known = ", ".join(sorted(table)) or "none defined"
        raise _CliError(EXIT_RESOLVE, f"unknown {what} {name!r} ({known})")
    return table[name]


def _parse_point(text: str, algebra, n: int) -> APoint:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_RESOLVE, f"--point is not valid JSON: {exc}") from exc
    if not isinstance(raw, list) or len(raw) != n:
        raise _CliError(
            EXIT_RESOLVE, f"--point needs {n} coordinate vectors, got {raw!r}"
        )
    coords = []
    for vec in raw:
        if not isinstance(vec, list) or len(vec) != algebra.dim:
            raise _CliError(
                EXIT_RESOLVE,
                f"each coordinate needs {algebra.dim} coefficients "
                f"(basis {algebra.basis_names()}), got {vec!r}",
            )
        coords.append(algebra.element([float(v) for v in vec]))
    return APoint(algebra, tuple(coords))


def _write_json(path: str | None, text: str):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_algebra_show(cfg: ProjectConfig, args) -> int:
    algebra = _resolve(cfg.algebras, args.name, "algebra")
    names = algebra.basis_names()
    print(f"{args.name}: {algebra.describe()}")
    print(f"dim={algebra.dim} height={algebra.height} basis=[{', '.join(names)}]")
    width = max(len(s) for s in names + ["0"]) + 2
    print("products:")
    header = " " * width + "".join(s.ljust(width) for s in names)
    print(f"  {header}")
    for i, row_name in enumerate(names):
        cells = []
        for j in range(algebra.dim):
            k = algebra.mult_table[i, j]
            cells.append((names[k] if k >= 0 else "0").ljust(width))
        print(f"  {row_name.ljust(width)}{''.join(cells)}")
    if args.json:
        _write_json(
            args.json,
            json.dumps(
                {
                    "name": args.name,
                    "dim": algebra.dim,
                    "height": algebra.height,
                    "basis": names,
                },
                sort_keys=True,
                indent=2,
            )
            + "\n",
        )
    return EXIT_OK


def _cmd_eval(cfg: ProjectConfig, args) -> int:
    expr = _resolve(cfg.expressions, args.expression, "expression")
    algebra = _resolve(cfg.algebras, args.algebra, "algebra")
    point = _parse_point(args.point, algebra, cfg.chart_dim)
    value = eval_weil(expr, point)
    print(render_element(value))
    if args.json:
        _write_json(
            args.json,
            json.dumps(
                {
                    "expression": args.expression,
                    "algebra": args.algebra,
                    "coefficients": [float(c) for c in value.coeffs],
                    "rendering": render_element(value, sig=17),
                },
                sort_keys=True,
                indent=2,
            )
            + "\n",
        )
    return EXIT_OK


def _cmd_bracket(cfg: ProjectConfig, args) -> int:
    pi = _resolve(cfg.bivectors, args.bivector, "bivector")
    f = _resolve(cfg.expressions, args.f, "expression")
    g = _resolve(cfg.expressions, args.g, "expression")
    result = bracket(pi, f, g)
    print(to_string(result))
    if args.algebra:
        if not args.point:
            raise _CliError(EXIT_RESOLVE, "--point is required with --algebra")
        algebra = _resolve(cfg.algebras, args.algebra, "algebra")
        point = _parse_point(args.point, algebra, cfg.chart_dim)
        print(render_element(eval_weil(result, point)))
    return EXIT_OK


def _cmd_prolong(cfg: ProjectConfig, args) -> int:
    theta = _resolve(cfg.vector_fields, args.field, "vector field")
    f = _resolve(cfg.expressions, args.expression, "expression")
    algebra = _resolve(cfg.algebras, args.algebra, "algebra")
    point = _parse_point(args.point, algebra, cfg.chart_dim)
    action = apply_field(theta, f)
    print(to_string(action))
    print(render_element(eval_weil(action, point)))
    return EXIT_OK


def _cmd_check(cfg: ProjectConfig, args) -> int:
    seed = args.seed if args.seed is not None else cfg.suites.seed
    trials = args.trials if args.trials is not None else cfg.suites.trials
    tol = args.tol if args.tol is not None else cfg.suites.tol
    pi = _resolve(cfg.bivectors, args.pi, "bivector") if args.pi else None
    algebra = _resolve(cfg.algebras, args.algebra, "algebra") if args.algebra else None
    try:
        report = run_suite(args.suite, seed, trials, tol, pi=pi, algebra=algebra)
    except UnknownSuite as exc:
        raise _CliError(EXIT_RESOLVE, str(exc)) from exc
    print(report.summary())
    for w in report.witnesses:
        print(f"  witness residual={w.residual:.3e}")
        for key, val in sorted(w.inputs.items()):
            print(f"    {key}: {val}")
    if report.warning:
        print(f"  warning: {report.warning}")
    _write_json(args.json, report.to_json())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


_COMMANDS = {
    "algebra-show": _cmd_algebra_show,
    "eval": _cmd_eval,
    "bracket": _cmd_bracket,
    "prolong": _cmd_prolong,
    "check": _cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](cfg, args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except WeilcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOLVE


if __name__ == "__main__":
    sys.exit(main())
