"""Command-line interface: ``robddl compile|query|transform|bench``.

Exit codes: 0 success, 1 parse error, 2 internal invariant failure,
3 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import math
import multiprocessing as mp
import sys
import time
import warnings
from pathlib import Path

from robddl import dump, query, transform
from robddl.compile import INF, CompileConfig, Compiler, parse_level
from robddl.core import DiagramError, Store, stats, validate
from robddl.sat import Decider, ParseError, parse_dimacs

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_VALIDATION = 0, 1, 2, 3

CSV_HEADER = ["name", "vars", "clauses", "robdd0_nodes", "robdd0_edges", "inf_nodes",
              "inf_edges", "fbdd_nodes", "fbdd_edges", "compile_ms", "sat_ms"]


class UsageError(Exception):
    pass


def _lits(text: str) -> list[int]:
    """Parse a zero-terminated DIMACS literal list such as ``"1 -3 0"``."""
    try:
        nums = [int(t) for t in text.split()]
    except ValueError:
        raise UsageError(f"not a literal list: {text!r}") from None
    if nums and nums[-1] == 0:
        nums.pop()
    if 0 in nums:
        raise UsageError(f"0 inside literal list: {text!r}")
    return nums


def _read_cnf(path: str):
    data = sys.stdin.read() if path == "-" else Path(path).read_text()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return parse_dimacs(data)


def _read_diagram(path: str) -> tuple[Store, int]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return dump.loads(text)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _summary(store, root, **extra) -> str:
    s = stats(store, root)
    parts = [f"nodes={s['nodes']}", f"edges={s['edges']}", f"decisionNodes={s['decisionNodes']}"]
    parts += [f"{k}={v}" for k, v in extra.items()]
    return " ".join(parts)


def cmd_compile(args) -> int:
    cnf = _read_cnf(args.input)
    level = parse_level(args.level)
    store = Store()
    decider = Decider(cnf.base)
    comp = Compiler(store, cnf, cnf_cache=not args.no_cache, imps=args.imps, decider=decider)
    start = time.perf_counter()
    method = args.method or ("build-inf" if level == INF else "build")
    if method == "build-inf":
        if level != INF:
            raise UsageError("--method build-inf requires --level inf")
        root = comp.build_inf(cnf)
    else:
        root = comp.build(cnf, level)
    ms = (time.perf_counter() - start) * 1000
    report = validate(store, root, "robdd", i=level)
    if not report.ok:
        print(f"invariant failure: {report.violations[:3]}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.output:
        _write(args.output, dump.dumps(store, root))
    if args.dot:
        _write(args.dot, dump.to_dot(store, root))
    print(_summary(store, root, level=args.level, compile_ms=f"{ms:.1f}",
                   sat_calls=decider.calls))
    return EXIT_OK


def cmd_query(args) -> int:
    store, root = _read_diagram(args.diagram)
    report = validate(store, root, "robdd", i=INF)
    if not report.ok:
        print(f"not a ROBDD-inf: {report.violations[:3]}", file=sys.stderr)
        return EXIT_VALIDATION
    yes = {True: "yes", False: "no"}
    q, rest = args.query, args.args
    if q == "count":
        if len(rest) != 1:
            raise UsageError("count needs the universe size")
        print(query.count(store, root, int(rest[0])))
    elif q == "co":
        print(yes[query.is_consistent(store, root)])
    elif q == "va":
        print(yes[query.is_valid(store, root)])
    elif q == "ce":
        print(yes[query.clausal_entailment(store, root, _lits(" ".join(rest)))])
    elif q == "im":
        print(yes[query.implicant_check(store, root, _lits(" ".join(rest)))])
    elif q == "me":
        limit = int(rest[0]) if rest else None
        universe = range(1, args.vars + 1) if args.vars else store.support(root)
        for model in query.enumerate_models(store, root, universe, limit):
            print(" ".join(map(str, model)))
    elif q == "mincard":
        mc = query.minimum_cardinality(store, root)
        print("inf" if mc == math.inf else int(mc))
    return EXIT_OK


def cmd_transform(args) -> int:
    store, root = _read_diagram(args.diagram)
    op = args.op
    if op == "to-fbdd":
        out = transform.inf2fbdd(store, root)
    elif op == "to-robdd":
        out = transform.inf2robdd(store, root)
    elif op == "add-to-inf":
        out = transform.add_to_inf(store, root)
    else:
        out = query.condition(store, root, _lits(" ".join(args.term)))
    _write(args.output, dump.dumps(store, out))
    if args.output not in (None, "-"):
        print(_summary(store, out))
    return EXIT_OK


def bench_one(path: str) -> dict:
    """Benchmark record for one DIMACS file."""
    cnf = _read_cnf(path)
    store = Store()
    r0 = Compiler(store, cnf).build(cnf, 0)
    decider = Decider(cnf.base)
    start = time.perf_counter()
    rinf = Compiler(store, cnf, decider=decider).build_inf(cnf)
    ms = (time.perf_counter() - start) * 1000
    rf = transform.inf2fbdd(store, rinf)
    s0, si, sf = stats(store, r0), stats(store, rinf), stats(store, rf)
    return {
        "name": Path(path).stem, "vars": cnf.num_vars, "clauses": len(cnf.live()),
        "robdd0_nodes": s0["nodes"], "robdd0_edges": s0["edges"],
        "inf_nodes": si["nodes"], "inf_edges": si["edges"],
        "fbdd_nodes": sf["nodes"], "fbdd_edges": sf["edges"],
        "compile_ms": f"{ms:.1f}", "sat_ms": f"{decider.seconds * 1000:.1f}",
    }


def _bench_worker(path, conn):
    try:
        conn.send(("ok", bench_one(path)))
    except Exception as e:  # reported as a failed row
        conn.send(("error", repr(e)))
    conn.close()


def _bench_guarded(path: Path, timeout: float) -> dict:
    recv, send = mp.Pipe(duplex=False)
    proc = mp.get_context("fork").Process(target=_bench_worker, args=(str(path), send))
    proc.start()
    send.close()
    got = recv.recv() if recv.poll(timeout) else None
    proc.join(1)
    if proc.is_alive():
        proc.terminate()
        proc.join()
    if got is not None and got[0] == "ok":
        return got[1]
    row = {k: "-" for k in CSV_HEADER}
    row["name"] = path.stem
    if got is not None:
        print(f"{path.name}: {got[1]}", file=sys.stderr)
    return row


def cmd_bench(args) -> int:
    files = sorted(Path(args.directory).glob("*.cnf"))
    out = sys.stdout if args.csv == "-" else open(args.csv, "w", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_HEADER)
        writer.writeheader()
        for f in files:
            writer.writerow(_bench_guarded(f, args.timeout))
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robddl", description="ROBDD with implied literals")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile a DIMACS CNF")
    c.add_argument("input")
    c.add_argument("--level", default="inf", help="implied-literal bound, an integer or 'inf'")
    c.add_argument("--method", choices=["build", "build-inf"],
                   help="default: build-inf at level inf, build otherwise")
    c.add_argument("--imps", choices=["models", "horn"], default="models")
    c.add_argument("--no-cache", action="store_true", help="disable the CNF cache")
    c.add_argument("-o", "--output", help="diagram dump path ('-' for stdout)")
    c.add_argument("--dot", help="write a DOT rendering to this path")
    c.set_defaults(func=cmd_compile)

    q = sub.add_parser("query", help="query a ROBDD-inf dump")
    q.add_argument("diagram")
    q.add_argument("query", choices=["count", "co", "va", "ce", "im", "me", "mincard"])
    q.add_argument("args", nargs="*")
    q.add_argument("--vars", type=int, help="model enumeration universe 1..N")
    q.set_defaults(func=cmd_query)

    t = sub.add_parser("transform", help="transform a diagram dump")
    t.add_argument("diagram")
    t.add_argument("op", choices=["to-fbdd", "to-robdd", "add-to-inf", "condition"])
    t.add_argument("term", nargs="*")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_transform)

    b = sub.add_parser("bench", help="benchmark a directory of .cnf files into CSV")
    b.add_argument("directory")
    b.add_argument("csv")
    b.add_argument("--timeout", type=float, default=60.0, help="seconds per instance")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "level", None) is not None:
        try:
            CompileConfig(level=parse_level(args.level))
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_PARSE
    try:
        return args.func(args)
    except (DiagramError, ArithmeticError) as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ParseError, dump.DumpError, UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
