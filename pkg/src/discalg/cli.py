"""Command line front end.

Exit codes: 0 success, 1 usage or parse error, 2 validation error, 3 law failure.
Every artifact is computed in full before anything is written, and each file
is written to a temporary sibling and renamed into place.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from .alphabet import Alphabet
from .decompose import decompose
from .equation import parse_equation
from .errors import DiscalgError, ParseError, UsageError, ValidationError
from .formula import dump_formula, formula_table, load_formula
from .function import DiscreteFunction, format_table, parse_table, show_table
from .laws import LAW_GROUPS, DEFAULT_SAMPLES, run_laws
from .operator import operator_alphabet
from .ops import apply_op, parse_op, superpose
from .solver import semantic_solve, two_branch_names, two_branch_pipeline

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_LAW = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


# -- io helpers -------------------------------------------------------------------

def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _alpha_for(args) -> Alphabet | None:
    return operator_alphabet() if args.level == "operator" else None


def _load_table(path: str, args) -> DiscreteFunction:
    try:
        return parse_table(_read(path), _alpha_for(args))
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.message}", exc.line, exc.column) from None


def _emit(artifacts: dict[str, str], out: str | None, single: str | None = None) -> None:
    """Write ``artifacts`` (filename -> text) under directory ``out``; without ``out``
    print them to stdout.  ``single`` names the artifact to write when ``out`` is a file path."""
    if out is None:
        for text in artifacts.values():
            sys.stdout.write(text)
        return
    target = Path(out)
    if single is not None and (target.suffix or len(artifacts) == 1):
        write_atomic(target, artifacts[single])
        return
    for name, text in artifacts.items():
        write_atomic(target / name, text)


# -- verbs ------------------------------------------------------------------------

def cmd_decompose(args) -> int:
    f = _load_table(args.input, args)
    text = dump_formula(decompose(f, prune=not args.unpruned), f.alpha, f.arity)
    _emit({"formula.txt": text}, args.out, single="formula.txt")
    return EXIT_OK


def cmd_apply(args) -> int:
    current = [_load_table(p, args) for p in args.input]
    alpha = current[0].alpha
    for text in args.op:
        spec = parse_op(text, alpha)
        if spec.kind == "SUM":
            current = [superpose(current)]
        else:
            current = [apply_op(spec, f) for f in current]
    if len(current) != 1:
        raise UsageError("several inputs remain; combine them with --op SUM")
    _emit({"result.tbl": format_table(current[0])}, args.out, single="result.tbl")
    return EXIT_OK


def _bindings(pairs: Sequence[str], args) -> dict[str, DiscreteFunction]:
    out = {}
    for item in pairs:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"binding {item!r} is not NAME=PATH")
        out[name] = _load_table(path, args).with_name(name)
    return out


def cmd_solve(args) -> int:
    bindings = _bindings(args.bind, args)
    eq = parse_equation(_read(args.eq), bindings)
    W = semantic_solve(eq, strict=args.strict)
    names = two_branch_names(eq)
    artifacts: dict[str, str] = {"W.tbl": format_table(W)}
    if names is not None and eq.alpha.size == 3:
        result = two_branch_pipeline(*(bindings[n] for n in names))
        formula = result.formula
        if result.trace.W != W:
            print(
                "warning: the symbolic pipeline over-approximates the exact solution here; "
                "W.tbl holds the exact table and W_pipeline.tbl the pipeline's",
                file=sys.stderr,
            )
            artifacts["W_pipeline.tbl"] = format_table(result.trace.W.with_name("W_pipeline"))
        if args.trace:
            for name, fn in result.trace.named().items():
                if name != "W":
                    artifacts[f"{name}.tbl"] = format_table(fn.with_name(name))
    else:
        if args.trace:
            raise ValidationError("--trace needs a two-branch equation over three symbols")
        formula = decompose(W)
    if formula_table(formula, W.alpha, W.arity) != W:
        print("warning: the solution formula does not evaluate to W", file=sys.stderr)
    artifacts["solution.formula"] = dump_formula(formula, W.alpha, W.arity)
    _emit(artifacts, args.out)
    return EXIT_OK


def cmd_laws(args) -> int:
    report = run_laws(args.check, args.samples, args.seed)
    text = report.text()
    sys.stdout.write(text)
    if args.out:
        write_atomic(Path(args.out), text)
    if args.summary:
        write_atomic(Path(args.summary), json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.ok else EXIT_LAW


def cmd_show(args) -> int:
    text = _read(args.input)
    if text.lstrip().startswith("formula"):
        e, alpha, arity = load_formula(text, _alpha_for(args))
        sys.stdout.write(show_table(formula_table(e, alpha, arity)))
        return EXIT_OK
    f = _load_table(args.input, args)
    if f.name:
        print(f.name)
    sys.stdout.write(show_table(f))
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def _add_verbs(sub) -> None:
    p = sub.add_parser("decompose", help="write the trivial decomposition of a table")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--unpruned", action="store_true", help="keep terms whose cell is exactly 0")
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("apply", help="apply special operators in sequence")
    p.add_argument("--in", dest="input", required=True, nargs="+")
    p.add_argument("--op", required=True, action="append",
                   help="C(1,0,2), T1:(1,-1,0), T0:conv((1,0,0)), FALSE@3 or SUM; repeatable")
    p.add_argument("--out")
    p.set_defaults(run=cmd_apply)

    p = sub.add_parser("solve", help="solve an equation for its unknown")
    p.add_argument("--eq", required=True)
    p.add_argument("--bind", required=True, nargs="+", metavar="NAME=PATH")
    p.add_argument("--trace", action="store_true", help="also write every pipeline intermediate")
    p.add_argument("--strict", action="store_true", help="empty branch values absorb (strict semantics)")
    p.add_argument("--out", help="output directory")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("laws", help="run the composition law suite")
    p.add_argument("--check", default="all", choices=["all", *LAW_GROUPS])
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report file")
    p.add_argument("--summary", help="JSON summary file")
    p.set_defaults(run=cmd_laws)

    p = sub.add_parser("show", help="pretty-print a table or formula file")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(run=cmd_show)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discalg", description="Multi-valued discrete functions and their special operators.")
    parser.add_argument("--level", choices=["function", "operator"], default="function",
                        help="operator: tables use the symbols -e, o, e")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    _add_verbs(sub)
    lift = sub.add_parser("lift", help="run another verb at operator level")
    lift_sub = lift.add_subparsers(dest="lifted", required=True, parser_class=_Parser)
    _add_verbs(lift_sub)
    lift.set_defaults(level="operator")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verb == "lift":
            args.level = "operator"
        if getattr(args, "samples", 1) < 1:
            raise UsageError("--samples must be positive")
        return args.run(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DiscalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
