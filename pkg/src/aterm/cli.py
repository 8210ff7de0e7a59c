"""Command-line interface: ``aterm <command> ...``.

Exit status: 0 ok, 1 verification failure, 2 usage or syntax error,
3 bit budget exceeded, 4 domain error (division by zero, negative exponent).
Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from collections import defaultdict

import gmpy2

from . import oracles
from .errors import (
    ATermError, BudgetExceeded, EvalDomainError, NotSemiprime, PreconditionError,
    TermSyntaxError, UnboundVariable,
)
from .estimate import estimate_bits
from .evaluate import BUDGET_ENV_VAR, EvalBudget, Strategy, evaluate
from .formulas import (
    FactorMode, GcdMethod, build_factor_p_term, build_factorial_term, build_gcd_term,
    build_isqrt_term, factor_semiprime, gcd, isqrt_via_term, totient_semiprime,
)
from .harness import BENCH_SUITES, SUITES, run_bench, run_verify, write_bench_csv
from .term import free_variables, parse, render

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET, EXIT_DOMAIN = 0, 1, 2, 3, 4

_BIG_INT_BITS = 8192


def _int_text(v: int) -> str:
    # gmpy2 formats huge integers quickly and is not subject to int's str-digit limit
    return gmpy2.mpz(v).digits() if v.bit_length() > _BIG_INT_BITS else str(v)


def _json_line(obj) -> str:
    """json.dumps that tolerates integers of any size."""
    big: list[str] = []

    def swap(x):
        if isinstance(x, bool) or not isinstance(x, int):
            if isinstance(x, dict):
                return {k: swap(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [swap(v) for v in x]
            return x
        if x.bit_length() <= _BIG_INT_BITS:
            return x
        big.append(_int_text(x))
        return f"\x00{len(big) - 1}\x00"

    text = json.dumps(swap(obj))
    for i, digits in enumerate(big):
        text = text.replace(json.dumps(f"\x00{i}\x00"), digits, 1)
    return text


def _out(args, obj: dict, text: str) -> None:
    print(_json_line(obj) if args.json else text, flush=True)


def _parse_var(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value of {name!r} is not an integer: {value!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _budget(args) -> EvalBudget:
    if args.budget_bits is not None:
        return EvalBudget(args.budget_bits)
    return EvalBudget.from_env()


def _env(args) -> dict:
    return dict(args.var or [])


def _check_bound(t, env) -> None:
    missing = sorted(free_variables(t) - set(env))
    if missing:
        raise UnboundVariable(missing[0])


# --- commands ----------------------------------------------------------------

def cmd_eval(args) -> int:
    t = parse(args.expr)
    env = _env(args)
    _check_bound(t, env)
    value, stats = evaluate(t, env, _budget(args), args.strategy)
    obj = {"expr": args.expr, "result": value, "peak_bits": stats.peak_bits,
           "elapsed_ms": round(stats.elapsed * 1000, 3)}
    text = _int_text(value)
    if args.stats:
        counts = {"mul_count": stats.mul_count, "pow_count": stats.pow_count, "div_count": stats.div_count}
        obj.update(counts)
        text += f"\npeak_bits {stats.peak_bits}\n" + "\n".join(f"{k} {v}" for k, v in counts.items())
        text += f"\nelapsed_ms {obj['elapsed_ms']}"
    _out(args, obj, text)
    return EXIT_OK


def cmd_estimate(args) -> int:
    t = parse(args.expr)
    env = _env(args)
    _check_bound(t, env)
    est = estimate_bits(t, env, _budget(args))
    rows = est.table(t)
    if args.json:
        nodes = [{"path": ".".join(map(str, p)), "bound_bits": b, "term": render(node)} for p, node, b in rows]
        print(_json_line({"expr": args.expr, "total_bound_bits": est.total_bound_bits,
                          "root_bits": est.root_bits, "nodes": nodes}))
        return EXIT_OK
    print(f"total_bound_bits {est.total_bound_bits}")
    print(f"{'path':<16} {'bound_bits':>20}  term")
    for p, node, b in rows:
        label = ".".join(map(str, p)) or "."
        text = render(node)
        if len(text) > 60:
            text = text[:57] + "..."
        print(f"{label:<16} {b:>20}  {text}")
    return EXIT_OK


def cmd_term(args) -> int:
    if args.kind == "gcd":
        t = build_gcd_term(args.args[0], args.args[1], args.method, args.base)
    elif args.kind == "isqrt":
        t = build_isqrt_term(args.args[0])
    elif args.kind == "factorial":
        t = build_factorial_term(args.args[0])
    else:
        t = build_factor_p_term(args.args[0], args.args[1], args.method)
    print(render(t))
    return EXIT_OK


_TERM_ARITY = {"gcd": 2, "isqrt": 1, "factorial": 1, "factor-p": 2}


def cmd_gcd(args) -> int:
    value = gcd(args.a, args.b, args.method, args.base, _budget(args), args.strategy)
    method = GcdMethod.parse(args.method).value
    verified = value == oracles.gcd_euclid(args.a, args.b)
    _out(args, {"a": args.a, "b": args.b, "method": method, "result": value, "verified": verified},
         str(value))
    return EXIT_OK if verified else EXIT_FAIL


def cmd_isqrt(args) -> int:
    used_term = False
    if args.method == "term":
        value, _, used_term = isqrt_via_term(args.n, _budget(args))
    else:
        value = oracles.isqrt(args.n)
    verified = value == oracles.isqrt(args.n)
    _out(args, {"n": args.n, "method": args.method, "result": value, "used_term": used_term,
                "verified": verified}, str(value))
    return EXIT_OK if verified else EXIT_FAIL


def cmd_factorial(args) -> int:
    if args.method == "term":
        value, _ = evaluate(build_factorial_term(args.k), budget=_budget(args))
    elif args.method == "matiyasevich":
        value = oracles.factorial_matiyasevich(args.k)
    else:
        value = oracles.factorial(args.k)
    verified = value == oracles.factorial(args.k)
    _out(args, {"k": args.k, "method": args.method, "result": value, "verified": verified}, _int_text(value))
    return EXIT_OK if verified else EXIT_FAIL


def cmd_factor(args) -> int:
    try:
        r = factor_semiprime(args.n, args.mode, _budget(args), strict=args.strict)
    except NotSemiprime as exc:
        print(f"aterm: verification failed: {exc}", file=sys.stderr)
        if args.json and exc.result is not None:
            print(_json_line(exc.result.as_dict()))
        return EXIT_FAIL
    if r.outside_closed_form:
        print(f"aterm: note: {args.n} is a square; root taken by oracle, not by the closed form",
              file=sys.stderr)
    _out(args, r.as_dict(), f"{r.p} {r.q}")
    return EXIT_OK


def cmd_totient(args) -> int:
    try:
        value = totient_semiprime(args.n, args.mode, _budget(args))
    except NotSemiprime as exc:
        print(f"aterm: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _out(args, {"n": args.n, "mode": args.mode, "result": value}, str(value))
    return EXIT_OK


def cmd_verify(args) -> int:
    methods = args.methods.split(",") if args.methods else None

    def stream(outcome):
        if args.json:
            print(_json_line(outcome.as_dict()), flush=True)
        elif outcome.status != "pass":
            print(f"{outcome.status:<9} {outcome.inputs} expected={outcome.expected} "
                  f"actual={outcome.actual} {outcome.detail}".rstrip(), flush=True)

    report = run_verify(args.suite, args.min, args.max, methods, args.mode, args.strategy,
                        _budget(args), args.strict, on_outcome=stream)
    if args.json:
        print(_json_line(report.summary()))
    else:
        print(f"suite {report.suite} {report.params}")
        print(f"cases {report.cases}  passed {report.passed}  mismatches {len(report.mismatches)}  "
              f"budget_exceeded {len(report.budget_exceeded)}  excluded {len(report.excluded)}  "
              f"elapsed {report.elapsed:.3f}s")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_bench(args) -> int:
    methods = args.methods.split(",") if args.methods else None
    lo, hi = args.min, args.max
    if lo is not None and hi is not None and lo > hi:
        print(f"aterm: error: empty range {lo}..{hi}", file=sys.stderr)
        return EXIT_USAGE
    records = run_bench(args.suite, lo, hi, methods, _budget(args),
                        on_skip=lambda msg: print(f"aterm: skipped {msg}", file=sys.stderr))
    if not records:
        print("aterm: error: no benchmark cases in range", file=sys.stderr)
        return EXIT_USAGE
    write_bench_csv(records, args.csv)
    by_method = defaultdict(list)
    for r in records:
        by_method[r.method].append(r)
    for method, rows in by_method.items():
        summary = {
            "suite": args.suite, "method": method, "rows": len(rows),
            "ok": sum(r.ok for r in rows),
            "median_elapsed_us": round(statistics.median(r.elapsed_us for r in rows), 1),
            "max_peak_bits": max(r.peak_bits for r in rows),
        }
        _out(args, summary, "  ".join(f"{k} {v}" for k, v in summary.items()))
    return EXIT_OK if all(r.ok for r in records) else EXIT_FAIL


# --- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON object per result line")
    common.add_argument("--budget-bits", type=int, default=None,
                        help=f"ceiling on intermediate bit length (default ${BUDGET_ENV_VAR} or 2^30)")

    p = _Parser(prog="aterm", description="Arithmetic terms with exact big-integer evaluation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    strategies = [s.value for s in Strategy]
    gcd_methods = ["mazzanti", "poly-base", "poly_base", "modmod", "euclid"]
    modes = [m.value for m in FactorMode]

    s = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    s.add_argument("expr")
    s.add_argument("--var", action="append", type=_parse_var, metavar="NAME=VALUE")
    s.add_argument("--strategy", choices=strategies, default="naive")
    s.add_argument("--stats", action="store_true")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("estimate", parents=[common], help="bound intermediate sizes without evaluating")
    s.add_argument("expr")
    s.add_argument("--var", action="append", type=_parse_var, metavar="NAME=VALUE")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("term", help="print a formula as expression text")
    s.add_argument("kind", choices=sorted(_TERM_ARITY))
    s.add_argument("args", nargs="+", type=_positive)
    s.add_argument("--method", choices=gcd_methods, default="poly_base")
    s.add_argument("--base", type=_positive)
    s.set_defaults(func=cmd_term)

    s = sub.add_parser("gcd", parents=[common], help="gcd through a closed form")
    s.add_argument("a", type=_positive)
    s.add_argument("b", type=_positive)
    s.add_argument("--method", choices=gcd_methods, default="modmod")
    s.add_argument("--base", type=_positive)
    s.add_argument("--strategy", choices=strategies)
    s.set_defaults(func=cmd_gcd)

    s = sub.add_parser("isqrt", parents=[common], help="floor(sqrt n)")
    s.add_argument("n", type=_nonneg)
    s.add_argument("--method", choices=["term", "oracle"], default="term")
    s.set_defaults(func=cmd_isqrt)

    s = sub.add_parser("factorial", parents=[common], help="k!")
    s.add_argument("k", type=_nonneg)
    s.add_argument("--method", choices=["term", "matiyasevich", "oracle"], default="term")
    s.set_defaults(func=cmd_factorial)

    s = sub.add_parser("factor", parents=[common], help="split a semiprime n = p*q")
    s.add_argument("n", type=_positive)
    s.add_argument("--mode", choices=modes, default="hybrid")
    s.add_argument("--strict", action="store_true", help="reject square inputs")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("totient", parents=[common], help="phi(n) of a semiprime")
    s.add_argument("n", type=_positive)
    s.add_argument("--mode", choices=modes, default="hybrid")
    s.set_defaults(func=cmd_totient)

    s = sub.add_parser("verify", parents=[common], help="sweep a formula against its oracle")
    s.add_argument("--suite", choices=SUITES, required=True)
    s.add_argument("--min", type=int)
    s.add_argument("--max", type=int)
    s.add_argument("--methods", help="comma-separated gcd methods (gcd suite)")
    s.add_argument("--mode", choices=modes, default="hybrid", help="factor suite mode")
    s.add_argument("--strategy", choices=strategies, default="rewrite")
    s.add_argument("--strict", action="store_true", help="abort with exit 3 on the first over-budget case")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bench", parents=[common], help="time methods and write a CSV")
    s.add_argument("--suite", choices=BENCH_SUITES, required=True)
    s.add_argument("--min", type=int)
    s.add_argument("--max", type=int)
    s.add_argument("--methods", help="comma-separated gcd methods or factor modes")
    s.add_argument("--csv", required=True, metavar="PATH")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported on stderr
        return exc.code
    if getattr(args, "kind", None) and len(args.args) != _TERM_ARITY[args.kind]:
        print(f"aterm: error: term {args.kind} takes {_TERM_ARITY[args.kind]} integer(s)", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except TermSyntaxError as exc:
        print(f"aterm: syntax error: {exc}\n{exc.caret()}", file=sys.stderr)
        return EXIT_USAGE
    except (UnboundVariable, PreconditionError) as exc:
        print(f"aterm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"aterm: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except EvalDomainError as exc:
        print(f"aterm: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ATermError as exc:
        print(f"aterm: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # e.g. an out-of-range --budget-bits or unknown method name
        print(f"aterm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
