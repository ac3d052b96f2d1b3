"""Command-line interface.

    demandlog run PROGRAM -q "p(1,X)?" [--facts DIR] [--engine ebu|naive|td]
    demandlog transform PROGRAM -q QUERY
    demandlog stratify PROGRAM
    demandlog bounds PROGRAM -q QUERY [--facts DIR]
    demandlog bench chain 1000 2000 [--program balbin]

Results go to stdout, diagnostics to stderr.  Exit status is 0 on success,
1 on a usage error and 2 on a semantic error (parse, stratification,
floundering, unknown predicate, violated bound).
"""
from __future__ import annotations

import argparse
import sys

from . import bench
from .analysis import NotStratified, build_dependency_graph, stratify
from .complexity import check_bounds
from .frontend import load_facts_dir, load_program, parse_program, parse_query
from .model import DatalogError, ground
from .pipeline import ENGINES, demand_keys, solve
from .transform import extended_demand_transform

EXIT_USAGE, EXIT_SEMANTIC = 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _inputs(args):
    if getattr(args, "pretransformed", False):
        with open(args.program, encoding="utf-8") as fh:
            program = parse_program(fh.read(), args.program, disjoint=False)
    else:
        program = load_program(args.program)
    facts = load_facts_dir(args.facts) if getattr(args, "facts", None) else {}
    return program, parse_query(args.query), facts


def _log_lines(keys):
    return "".join(f"{p}\t{s}\t{','.join(c)}\n" for p, s, c in keys)


def cmd_run(args, out, err) -> int:
    program, query, facts = _inputs(args)
    sol = solve(program, query, facts, engine=args.engine, dedup=args.dedup,
                kernel=args.kernel, pretransformed=args.pretransformed)
    for values in sol.answers:
        out.write(f"{ground(query.pred, values)}\n")
    if args.stats:
        if sol.firings is not None:
            for rid, n in sol.firings.by_id().items():
                err.write(f"firings.{rid}={n}\n")
            err.write(f"firings.total={sol.firings.total}\n")
            err.write(f"given={sol.store.given}\n")
            for pred, n in sorted(sol.store.sizes().items()):
                err.write(f"size.{pred}={n}\n")
        err.write(f"answers={len(sol.answers)}\n")
    if args.log_subqueries:
        if sol.log is not None:
            err.write(sol.log.render())
        elif sol.store is not None:
            err.write(_log_lines(sorted(demand_keys(sol.store))))
    return 0


def cmd_transform(args, out, err) -> int:
    program = load_program(args.program)
    result = extended_demand_transform(program, parse_query(args.query), dedup=args.dedup)
    out.write(result.render(provenance=not args.no_provenance))
    return 0


def cmd_stratify(args, out, err) -> int:
    program = load_program(args.program)
    result = stratify(build_dependency_graph(program))
    if isinstance(result, NotStratified):
        err.write(f"error: program is not stratified: {result}\n")
        return EXIT_SEMANTIC
    for pred, s in sorted(result.stratum.items(), key=lambda kv: (kv[1], kv[0])):
        out.write(f"{pred}\t{s}\n")
    return 0


def cmd_bounds(args, out, err) -> int:
    program, query, facts = _inputs(args)
    sol = solve(program, query, facts, dedup=args.dedup, kernel=args.kernel)
    report = check_bounds(sol.compiled.rules, sol.store, sol.firings)
    out.write(report.render())
    if not report.ok:
        for v in report.violations():
            err.write(f"error: bound violated: {v}\n")
        return EXIT_SEMANTIC
    return 0


def cmd_bench(args, out, err) -> int:
    program = args.program or bench.default_program(args.family)
    try:
        sizes = [bench.parse_size(args.family, s) for s in args.sizes]
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    out.write(bench.bench_table(program, args.family, sizes, args.seed,
                                timing=not args.no_timing, kernel=args.kernel))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="demandlog", description="Demand-driven Datalog with stratified negation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def program_args(sp, query=True, facts=True):
        sp.add_argument("program", help="rule file")
        if query:
            sp.add_argument("-q", "--query", required=True, help='query such as "p(1,X)?"')
        if facts:
            sp.add_argument("--facts", metavar="DIR", help="directory of <pred>.facts TSV files")

    def kernel_arg(sp):
        sp.add_argument("--kernel", choices=("auto", "python", "compiled"), default="auto",
                        help="evaluation kernel (default: compiled when built)")

    r = sub.add_parser("run", help="answer a query")
    program_args(r)
    r.add_argument("--engine", choices=ENGINES, default="ebu")
    r.add_argument("--stats", action="store_true", help="firing counts and sizes on stderr")
    r.add_argument("--log-subqueries", action="store_true",
                   help="subqueries (td) or demand facts (ebu) on stderr")
    r.add_argument("--dedup", action="store_true", help="drop alpha-equivalent transformed rules")
    r.add_argument("--pretransformed", action="store_true",
                   help="PROGRAM is already the output of `transform`")
    kernel_arg(r)
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("transform", help="print the extended demand transformation")
    program_args(t, facts=False)
    t.add_argument("--dedup", action="store_true")
    t.add_argument("--no-provenance", action="store_true", help="omit step labels")
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("stratify", help="print predicate strata")
    program_args(s, query=False, facts=False)
    s.set_defaults(func=cmd_stratify)

    b = sub.add_parser("bounds", help="check firings against per-rule bounds")
    program_args(b)
    b.add_argument("--dedup", action="store_true")
    kernel_arg(b)
    b.set_defaults(func=cmd_bounds)

    g = sub.add_parser("bench", help="time a fixture program on generated graphs")
    g.add_argument("family", choices=bench.FAMILIES)
    g.add_argument("sizes", nargs="*", help="N for chain/complete, NODES:EDGES for random")
    g.add_argument("--program", choices=sorted(bench.FIXTURES))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--no-timing", action="store_true", help="print '-' for seconds (deterministic output)")
    kernel_arg(g)
    g.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except DatalogError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SEMANTIC
    except (OSError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
