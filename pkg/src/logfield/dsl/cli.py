"""Command line: ``repl``, ``run``, ``eval``, ``check-asymptotic`` and ``selftest``."""

import argparse
import json
import logging
import sys

from ..errors import LogfieldError
from ..monomials import parse_monomial
from ..numeric import EvalGrid, builtin_germ, check_o
from ..series import Budget, observing
from .evaluator import DEFAULT_SHOW, Env, _as_series, elaborate, error_to_json, format_value, value_to_json
from .parser import Let, parse_program

PROMPT = "logfield> "


def _budget(args):
    base = Budget.from_env()
    return Budget(
        max_terms=args.max_terms if args.max_terms is not None else base.max_terms,
        max_steps=args.max_steps if args.max_steps is not None else base.max_steps,
    )


def _print_error(exc, as_json, out):
    if as_json:
        out.write(json.dumps(error_to_json(exc)) + "\n")
    else:
        sys.stderr.write(f"error[{getattr(exc, 'kind', type(exc).__name__)}]: {exc}\n")


def run_statements(text, env, out=sys.stdout, show=DEFAULT_SHOW):
    """Execute statements, printing the value of each expression statement."""
    for stmt in parse_program(text):
        with observing(env.budget):
            value = elaborate(stmt, env)
        if not isinstance(stmt, Let):
            out.write(format_value(value, show, env.budget) + "\n")


def run_script(path, env=None, out=sys.stdout):
    env = env or Env()
    with open(path, encoding="utf-8") as fh:
        run_statements(fh.read(), env, out, env.show_terms)


def repl(env=None, inp=sys.stdin, out=sys.stdout):
    """Read statements line by line; errors are reported and the session continues."""
    env = env or Env()
    interactive = inp.isatty()
    while True:
        if interactive:
            out.write(PROMPT)
            out.flush()
        line = inp.readline()
        if not line:
            break
        line = line.strip()
        if line in (":q", ":quit", "exit"):
            break
        if not line:
            continue
        try:
            run_statements(line, env, out, env.show_terms)
        except (LogfieldError, ZeroDivisionError) as exc:
            _print_error(exc, False, out)
    return 0


def _cmd_eval(args, out):
    env = Env(budget=_budget(args), show_terms=args.terms)
    try:
        stmts = parse_program(args.expr)
        value = None
        for stmt in stmts:
            with observing(env.budget):
                value = elaborate(stmt, env)
        if args.json:
            out.write(json.dumps(value_to_json(value, args.terms, env.budget), sort_keys=True) + "\n")
        else:
            out.write(format_value(value, args.terms, env.budget) + "\n")
        return 0
    except (LogfieldError, ZeroDivisionError) as exc:
        _print_error(exc, args.json, out)
        return 1


def _cmd_check(args, out):
    env = Env(budget=_budget(args))
    try:
        germ = builtin_germ(args.germ)
        stmts = parse_program(args.series)
        F = None
        for stmt in stmts:
            with observing(env.budget):
                F = elaborate(stmt, env)
        F = _as_series(F, None, "check-asymptotic")
        n = parse_monomial(args.mono)
        grid = EvalGrid.parse(args.grid)
        report = check_o(germ, F, n, grid, env.budget, limit=args.limit)
        out.write(json.dumps(report.to_json()) + "\n")
        return 0 if report.verdict == "pass" else 1
    except (LogfieldError, ZeroDivisionError) as exc:
        _print_error(exc, True, out)
        return 1


def _cmd_selftest(args, out):
    from ..checks import run_all

    ok = run_all(quick=args.quick, out=out)
    return 0 if ok else 1


def _cmd_run(args, out):
    env = Env(budget=_budget(args))
    try:
        run_script(args.path, env, out)
        return 0
    except (LogfieldError, ZeroDivisionError) as exc:
        _print_error(exc, False, out)
        return 1
    except OSError as exc:
        sys.stderr.write(f"error[IOError]: {exc}\n")
        return 1


def build_parser():
    p = argparse.ArgumentParser(prog="logfield", description="Exact log-exp series workbench.")
    p.add_argument("--max-terms", type=int, default=None, help="observation term budget")
    p.add_argument("--max-steps", type=int, default=None, help="observation step budget")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("repl", help="interactive session")

    r = sub.add_parser("run", help="execute a script file")
    r.add_argument("path")

    e = sub.add_parser("eval", help="evaluate an expression")
    e.add_argument("expr")
    e.add_argument("--terms", type=int, default=DEFAULT_SHOW, help="terms to show for series")
    e.add_argument("--json", action="store_true")

    c = sub.add_parser("check-asymptotic", help="sample the o(n) truncation contract")
    c.add_argument("--germ", required=True, help="builtin germ name")
    c.add_argument("--series", required=True, help="series expression")
    c.add_argument("--mono", required=True, help="truncation monomial, e.g. x^-3")
    c.add_argument("--grid", default="100,1000,10000")
    c.add_argument("--limit", type=float, default=0.1, help="largest acceptable final ratio")

    s = sub.add_parser("selftest", help="run the property and oracle suites")
    s.add_argument("--quick", action="store_true", help="reduced case counts")
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        _budget(args)
    except LogfieldError as exc:
        _print_error(exc, False, out)
        return 2
    if args.command == "repl":
        return repl(Env(budget=_budget(args)), out=out)
    handlers = {
        "run": _cmd_run,
        "eval": _cmd_eval,
        "check-asymptotic": _cmd_check,
        "selftest": _cmd_selftest,
    }
    return handlers[args.command](args, out)


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
