"""Command line: dynq run | gen | bench."""

from __future__ import annotations

import argparse
import sys

from .core import KINDS, QUERY_KINDS, format_script, parse_script
from .errors import DynqError, ScriptSyntaxError, VerificationError
from .gen import doubling_profile, generate
from .session import MAX_N, Session, bench

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"dynq: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog="dynq", description="Batch-dynamic query maintenance by synchronous rounds.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="execute a change script")
    r.add_argument("file")
    r.add_argument("--verify", action="store_true", help="check every step against the oracles")
    r.add_argument("--report", choices=("rounds", "csv"), default="csv")
    r.add_argument("--max-n", type=int, default=None, help="refuse scripts with larger n")
    r.add_argument("--no-wall", action="store_true", help="omit the wall-time column")

    g = sub.add_parser("gen", help="write a pseudo-random change script")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--n", type=int, default=16)
    g.add_argument("--steps", type=int, default=20)
    g.add_argument("--batch", type=int, default=None, help="largest batch (default: ceil(log2 n)^3)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--delta", type=int, default=None, help="degree bound (ugraph colouring)")
    g.add_argument("--grammar", default=None, help="grammar file or builtin name (word)")
    g.add_argument("--queries", default=None, help="comma-separated query kinds")
    g.add_argument("--profile", choices=("random", "doubling"), default="random")
    g.add_argument("-o", "--output", default=None)

    b = sub.add_parser("bench", help="median step timings over replays")
    b.add_argument("file")
    b.add_argument("--repetitions", type=int, default=3)
    b.add_argument("--max-n", type=int, default=None)
    return p


def _load(path, max_n):
    try:
        with open(path, "rb") as f:
            script = parse_script(f.read())
    except OSError as exc:
        raise _Usage(str(exc)) from None
    cap = MAX_N[script.kind] if max_n is None else max_n
    if script.n > cap:
        raise _Usage(f"n={script.n} exceeds the cap {cap} for kind {script.kind}")
    return script


def cmd_run(args):
    script = _load(args.file, args.max_n)
    report = Session(script, verify=args.verify).run()
    if args.report == "csv":
        sys.stdout.write(report.to_csv(wall=not args.no_wall))
    else:
        sys.stdout.write(report.to_rounds())
    if not report.within_bounds():
        print("dynq: a step used more rounds than its bound", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_gen(args):
    if args.profile == "doubling":
        script = doubling_profile(args.n, args.steps)
    else:
        queries = None
        if args.queries:
            queries = [q.strip() for q in args.queries.split(",") if q.strip()]
            bad = [q for q in queries if q not in QUERY_KINDS]
            if bad:
                raise _Usage(f"unknown query kinds {bad}")
        script = generate(args.kind, args.n, args.steps, args.batch, args.seed, args.delta,
                          args.grammar, queries)
    text = format_script(script)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args):
    script = _load(args.file, args.max_n)
    sys.stdout.write(bench(script, args.repetitions))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "gen": cmd_gen, "bench": cmd_bench}[args.cmd]
    try:
        return handler(args)
    except _Usage as exc:
        print(f"dynq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScriptSyntaxError as exc:
        print(f"dynq: {args.__dict__.get('file', '')}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"dynq: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DynqError as exc:
        print(f"dynq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
