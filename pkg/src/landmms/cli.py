"""Command-line front end: generate instances, compute shares, allocate, verify and benchmark.

Machine-readable output (JSON or CSV) goes to files or stdout; human
summaries go to stderr. Exit codes: 0 success, 1 no feasible partition or
selection, 2 verification failure, 3 input error, 4 oracle budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .allocation import allocate_fat, allocate_pipeline, allocation_problems, nfat_parts
from .errors import BudgetExceeded, InstanceFormatError, NoFeasiblePartition, NoSelection
from .geometry import Rect, Shape, format_rational, parse_rational
from .instances import (UNIT_SQUARE, Instance, gen_crossing_fixture, gen_polygon_fixture, gen_random,
                        gen_uniform, load)
from .partition import DEFAULT_BUDGET, brute_force_mms, guillotine_mms_dp
from .valuation import GridValuation, QueryLog

EXIT_OK, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which would read as a verification failure
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _shape(text: str) -> Shape:
    try:
        return Shape.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_instance(path: str) -> Instance:
    try:
        return load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def oracle_grid(v: GridValuation, land: Rect, steps: int) -> tuple[list[Fraction], list[Fraction]]:
    """Valuation breakpoints plus ``steps`` equal subdivisions of the land."""
    xs = {land.x_lo + land.width * Fraction(i, steps) for i in range(steps + 1)}
    ys = {land.y_lo + land.height * Fraction(j, steps) for j in range(steps + 1)}
    xs |= {x for x in v.x_coords if land.x_lo <= x <= land.x_hi}
    ys |= {y for y in v.y_coords if land.y_lo <= y <= land.y_hi}
    return sorted(xs), sorted(ys)


# -- subcommands -----------------------------------------------------------------

def cmd_gen(args) -> int:
    shape = args.shape or Shape()
    if args.kind == "uniform":
        inst = gen_uniform(UNIT_SQUARE, args.n, args.s, shape)
    elif args.kind == "random":
        inst = gen_random(args.seed, UNIT_SQUARE, args.n, args.s, (args.grid, args.grid), shape)
    elif args.kind == "crossing":
        eps = args.eps if args.eps is not None else (args.r - math.ceil(args.r) + 1) / 2
        vertical, horizontal = gen_crossing_fixture(args.r, eps)
        side = max(q.x_hi for q in vertical)
        land = Rect(0, side, 0, side)
        agents = tuple((name, GridValuation.from_boxes(land, [(q, 1) for q in qs]))
                       for name, qs in (("A", vertical), ("B", horizontal)))
        inst = Instance(land, args.s, agents, Shape("square") if args.r == 1 else Shape("fat", args.r))
    else:
        inst = gen_polygon_fixture(args.n, args.s).instance
    _emit(_dump(inst.to_json()), args.out)
    _say(f"generated {args.kind} instance: {inst.n} agents, s={format_rational(inst.s)}")
    return EXIT_OK


def cmd_mms(args) -> int:
    inst = _load_instance(args.inp)
    try:
        v = inst.valuation(args.agent)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    shape = args.shape or inst.shape
    if args.dp:
        if args.eps is None:
            raise InputError("--dp needs --eps")
        if shape.kind != "rectangle":
            raise InputError("--dp computes guillotine rectangle partitions only")
        log = QueryLog()
        total = v.total
        if total == 0:
            raise NoFeasiblePartition(f"{args.agent} values the land at 0")
        res = guillotine_mms_dp(v.scaled(1 / total), inst.land, inst.s, args.k, args.eps,
                                log_=log, agent=args.agent)
        res = type(res)(res.value * total, res.partition, res.tree, res.method, res.k, res.s, res.eps)
        _say(f"{args.agent}: guillotine {args.k}-share >= {format_rational(res.value)} "
             f"({log.count(args.agent, 'eval')} eval, {log.count(args.agent, 'cut')} cut queries)")
    else:
        grid = oracle_grid(v, inst.land, args.grid)
        res = brute_force_mms(v, grid, inst.s, args.k, shape, args.guillotine_only, args.budget)
        _say(f"{args.agent}: {args.k}-share on the grid = {format_rational(res.value)}")
    _emit(_dump(res.to_json()), args.out)
    return EXIT_OK


def _read_partitions(path: str, inst: Instance) -> dict[str, list[Rect]]:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected an object mapping agent names to rectangle lists")
    out = {}
    for name in inst.names:
        if name not in data:
            raise InputError(f"{path}: no partition for agent {name}")
        try:
            out[name] = [Rect.from_json(q) for q in data[name]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: bad rectangle for agent {name}: {exc}") from exc
    return out


def cmd_solve(args) -> int:
    inst = _load_instance(args.inp)
    shape = args.shape or inst.shape
    if shape.kind == "rectangle":
        inst = Instance(inst.land, inst.s, inst.agents, shape)
        alloc, report = allocate_pipeline(inst, args.eps)
    else:
        r = shape.ratio
        if args.partitions:
            partitions = _read_partitions(args.partitions, inst)
            report = {"partitions": "supplied"}
        else:
            k = nfat_parts(r, inst.n)
            partitions, shares = {}, {}
            for name, v in inst.agents:
                res = brute_force_mms(v, oracle_grid(v, inst.land, args.grid), inst.s, k, shape,
                                      budget=args.budget)
                partitions[name] = list(res.partition.parts)
                shares[name] = format_rational(res.value)
            report = {"partitions": "brute_force", "k": k, "grid_shares": shares}
        alloc = allocate_fat(inst, r, partitions)
        report["agents"] = {name: {"achieved": format_rational(v.value_of(alloc.assignments[name]))}
                            for name, v in inst.agents}
    out = alloc.to_json()
    out["report"] = report
    _emit(_dump(out), args.out)
    for name in inst.names:
        _say(f"{name}: {alloc.assignments[name]} worth {report['agents'][name]['achieved']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load_instance(args.inp)
    data = _read_json(args.alloc)
    try:
        assignments = {name: Rect.from_json(q) for name, q in data["assignments"].items()}
        shape = Shape.from_json(data.get("shape", inst.shape.to_json()))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"{args.alloc}: malformed allocation: {exc}") from exc
    problems = allocation_problems(assignments, inst.land, inst.s, shape)
    missing = sorted(set(inst.names) - set(assignments))
    extra = sorted(set(assignments) - set(inst.names))
    problems += [f"agent {name} has no piece" for name in missing]
    problems += [f"unknown agent {name}" for name in extra]
    if args.bound and not missing:
        kind, _, k_text = args.bound.partition(":")
        if kind != "mms" or not k_text.isdigit() or int(k_text) < 1:
            raise InputError(f"--bound must look like mms:K, got {args.bound!r}")
        k = int(k_text)
        for name, v in inst.agents:
            try:
                res = brute_force_mms(v, oracle_grid(v, inst.land, args.grid), inst.s, k, inst.shape,
                                      budget=args.budget)
            except NoFeasiblePartition:
                _say(f"{name}: no {k}-part partition on the oracle grid; share bound is 0")
                continue
            got = v.value_of(assignments[name])
            if got < res.value - args.slack:
                problems.append(f"{name} gets {format_rational(got)} < oracle share {format_rational(res.value)}")
            else:
                _say(f"{name}: {format_rational(got)} >= oracle share {format_rational(res.value)}")
    for p in problems:
        _say(f"FAIL {p}")
    if problems:
        return EXIT_VERIFY
    _say("allocation verified")
    return EXIT_OK


def cmd_bench(args) -> int:
    suite = _read_json(args.suite)
    runs = suite.get("runs") if isinstance(suite, dict) else None
    if not isinstance(runs, list):
        raise InputError(f"{args.suite}: expected an object with a 'runs' list")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["run", "agent", "n", "s", "eps", "achieved", "guaranteed", "ratio", "eval_queries", "cut_queries"])
    for idx, run in enumerate(runs):
        try:
            name = str(run.get("name", f"run{idx}"))
            n, s, eps = int(run["n"]), parse_rational(str(run["s"])), parse_rational(str(run["eps"]))
            if run.get("kind", "random") == "uniform":
                inst = gen_uniform(UNIT_SQUARE, n, s)
            else:
                g = int(run.get("grid", 6))
                inst = gen_random(int(run.get("seed", idx)), UNIT_SQUARE, n, s, (g, g))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.suite}: bad run {idx}: {exc}") from exc
        _, report = allocate_pipeline(inst, eps)
        for agent, entry in sorted(report["agents"].items()):
            achieved, guaranteed = parse_rational(entry["achieved"]), parse_rational(entry["guaranteed"])
            ratio = f"{float(achieved / guaranteed):.6f}" if guaranteed else ""
            writer.writerow([name, agent, n, format_rational(s), format_rational(eps), entry["achieved"],
                             entry["guaranteed"], ratio, entry["queries"]["eval"], entry["queries"]["cut"]])
        _say(f"{name}: done")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="landmms", description="Fair land division with separation and maximin shares.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", required=True, choices=["uniform", "random", "crossing", "polygon"])
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--s", type=_rational, default=Fraction(0))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--grid", type=int, default=6, help="cells per side for random instances")
    g.add_argument("--r", type=_rational, default=Fraction(1), help="fatness bound for the crossing fixture")
    g.add_argument("--eps", type=_rational, help="overhang for the crossing fixture (default: the largest that keeps r-fatness)")
    g.add_argument("--shape", type=_shape)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("mms", help="compute one agent's maximin partition")
    m.add_argument("--in", dest="inp", required=True)
    m.add_argument("--agent", required=True)
    m.add_argument("--k", type=int, required=True)
    how = m.add_mutually_exclusive_group(required=True)
    how.add_argument("--dp", action="store_true", help="guillotine search (needs --eps)")
    how.add_argument("--exact", action="store_true", help="brute force on the oracle grid")
    m.add_argument("--eps", type=_rational)
    m.add_argument("--guillotine-only", type=_bool, default=False)
    m.add_argument("--shape", type=_shape)
    m.add_argument("--grid", type=int, default=4, help="extra equal subdivisions of the oracle grid")
    m.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    m.add_argument("--out")
    m.set_defaults(func=cmd_mms)

    s = sub.add_parser("solve", help="allocate the land")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--eps", type=_rational, required=True)
    s.add_argument("--shape", type=_shape)
    s.add_argument("--partitions", help="JSON object mapping agent names to their maximin parts")
    s.add_argument("--grid", type=int, default=4)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check an allocation from files alone")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--alloc", required=True)
    v.add_argument("--bound", help="mms:K compares each agent with her grid maximin share")
    v.add_argument("--slack", type=_rational, default=Fraction(0))
    v.add_argument("--grid", type=int, default=4)
    v.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a suite of generated instances through the pipeline")
    b.add_argument("--suite", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "grid", 1) < 1 or getattr(args, "budget", 1) < 1:
        _say("error: --grid and --budget must be positive")
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, InstanceFormatError) as exc:
        _say(f"error: {exc}")
        return EXIT_INPUT
    except BudgetExceeded as exc:
        _say(f"error: {exc}; raise --budget to continue")
        return EXIT_BUDGET
    except (NoFeasiblePartition, NoSelection) as exc:
        _say(f"error: {exc}")
        return EXIT_INFEASIBLE
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
