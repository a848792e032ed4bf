"""``tasp`` command-line driver.

Exit codes: 0 success, 1 usage error, 2 invalid instance, 3 no solution
(``solve`` only), 4 algorithm/oracle mismatch (``verify`` only).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .ewdg import (InstanceFormatError, format_bound, format_path, parse_bound,
                   parse_instance, serialize_instance, validate_instance)
from .generate import TOPOLOGIES, GenSpec, generate_instance
from .oracle import DEFAULT_NODE_LIMIT, InstanceTooLarge, solve_oracle
from .search import beast, beauty, beauty_and_beast, ei_ucs

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NO_SOLUTION, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


class InvalidInstance(Exception):
    pass


def _load(path: str):
    try:
        inst = parse_instance(Path(path).read_text(encoding="utf-8"))
    except InstanceFormatError as exc:
        raise InvalidInstance(f"{path}: {exc}") from None
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstance(f"{path}: " + "; ".join(problems))
    return inst


def _seed_range(text: str) -> list[int]:
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(s) for s in text.split(",") if s]


def _taus(text: str) -> tuple:
    out = []
    for part in text.split(","):
        x = float(part)
        out.append(int(x) if x.is_integer() else x)
    return tuple(out)


def cmd_generate(args) -> int:
    spec = GenSpec(topology=args.topology, node_count=args.nodes, layers=args.layers,
                   density=args.density, cost_max=args.cost_max, seed=args.seed,
                   rng_seed=args.rng_seed)
    try:
        inst = generate_instance(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.output, serialize_instance(inst))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.input)
    trace_lines = None
    if args.alg == "bnb":
        rep = beauty_and_beast(inst, share_cache=args.share_cache, trace=bool(args.trace))
        doc = {"instance": inst.name, "alg": "bnb", **rep.to_dict()}
        if args.trace:
            trace_lines = list(rep.slb_report.trace or ())
            if rep.sub_report is not None:
                trace_lines += list(rep.sub_report.trace or ())
            doc["slb"].pop("trace", None)
            if doc["sub"]:
                doc["sub"].pop("trace", None)
        found = rep.found
    else:
        if args.alg == "ei-ucs":
            rep = ei_ucs(inst, trace=bool(args.trace))
        elif args.alg == "beast":
            rep = beast(inst, args.u_prune, trace=bool(args.trace))
        else:
            rep = beauty(inst, args.l_prune, trace=bool(args.trace))
        doc = {"instance": inst.name, "alg": args.alg, **rep.to_dict()}
        trace_lines = doc.pop("trace", None)
        found = rep.found
    if args.trace:
        Path(args.trace).write_text("\n".join(trace_lines) + "\n", encoding="utf-8")
    _write(args.output, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if found else EXIT_NO_SOLUTION


def cmd_verify(args) -> int:
    inst = _load(args.input)
    try:
        orc = solve_oracle(inst, args.max_nodes)
    except InstanceTooLarge as exc:
        raise UsageError(str(exc)) from None
    lines = [f"instance {inst.name}",
             f"oracle L* = {format_bound(orc.l_star)}  witness {format_path(orc.slb_witness or ())}",
             f"oracle U* = {format_bound(orc.u_star)}  witness {format_path(orc.sub_witness or ())}",
             f"oracle B* = {format_bound(orc.b_star)}"]
    bnb = beauty_and_beast(inst)
    checks = [
        ("ei-ucs bound = U*", ei_ucs(inst).bound, orc.u_star),
        ("beast(inf) bound = U*", beast(inst).bound, orc.u_star),
        ("beauty(inf) bound = L*", beauty(inst).bound, orc.l_star),
        ("bnb B* = B*", bnb.b_star, orc.b_star),
    ]
    ok = True
    for label, got, want in checks:
        good = got == want
        ok &= good
        lines.append(f"{'PASS' if good else 'FAIL'} {label}: got {format_bound(got)}, "
                     f"expected {format_bound(want)}")
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_MISMATCH


def _sweep_specs(path: str) -> list[dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    specs = doc if isinstance(doc, list) else [doc]
    if not all(isinstance(s, dict) for s in specs):
        raise UsageError("sweep file must hold a JSON object or a list of objects")
    return specs


def cmd_bench(args) -> int:
    model = bench.CostModel(_taus(args.tau))
    corpus = []
    if args.corpus:
        files = sorted(Path(args.corpus).glob("*.json"))
        for f in files:
            corpus.append((_load(str(f)), None))
    else:
        for raw in _sweep_specs(args.sweep):
            for seed in _seed_range(args.seeds):
                try:
                    spec = GenSpec(**{**raw, "seed": seed})
                    corpus.append((generate_instance(spec), seed))
                except (TypeError, ValueError) as exc:
                    raise UsageError(f"bad sweep spec {raw}: {exc}") from None
    records = bench.run_benchmark(corpus, model, timeout=args.timeout, jobs=args.jobs)
    _write(args.output, bench.records_to_csv(records))
    return EXIT_OK


def cmd_report(args) -> int:
    text = Path(args.input).read_text(encoding="utf-8")
    try:
        records = bench.records_from_csv(text)
        table = bench.compute_metrics(records)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.output, bench.render_report(table, args.format))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tasp", description="Shortest paths on estimated weighted digraphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="synthesize a benchmark instance")
    g.add_argument("--topology", choices=TOPOLOGIES, default="layered")
    g.add_argument("--nodes", type=int, default=12)
    g.add_argument("--layers", type=int, default=4)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--cost-max", type=int, default=10)
    g.add_argument("--rng-seed", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run one algorithm on an instance")
    s.add_argument("--alg", choices=("ei-ucs", "beast", "beauty", "bnb"), required=True)
    s.add_argument("--u-prune", type=parse_bound, default=float("inf"))
    s.add_argument("--l-prune", type=parse_bound, default=float("inf"))
    s.add_argument("--share-cache", action="store_true",
                   help="bnb: let the BEAST phase reuse BEAUTY's estimates")
    s.add_argument("--trace")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="cross-check all algorithms against the oracle")
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--max-nodes", type=int, default=DEFAULT_NODE_LIMIT)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="benchmark a corpus or a generated sweep")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus")
    src.add_argument("--sweep")
    b.add_argument("--seeds", default="0..26")
    b.add_argument("--timeout", type=float, default=bench.DEFAULT_TIMEOUT)
    b.add_argument("--tau", default="1,10,100")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("report", help="aggregate a results CSV")
    r.add_argument("-i", "--input", required=True)
    r.add_argument("--format", choices=("csv", "json", "text"), default="text")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tasp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInstance as exc:
        print(f"tasp: invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        print(f"tasp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
