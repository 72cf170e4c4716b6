"""Command line entry point: ``nmqc <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .boolfn import AnfParseError, ArityError, BooleanFunction, bits_of, format_bits, parse_anf
from .bounds import (BellFunctional, OptimizerConfig, PriorDistribution, format_fraction,
                     functional_from_game, quantum_bound)
from .families import FamilySpec, SuiteConfig, make_family, verify_suite
from .gf2 import Gf2Matrix
from .sim import GhzResource, resource_from_json, sample_run
from .synth import (Protocol, decide_feasibility, iter_row_sets, synthesize_protocol)

BOUNDS_CSV_HEADER = ["n", "family", "c", "q", "q/c", "mean_success_c", "mean_success_q"]
SIMULATE_CSV_HEADER = ["x", "s", "m", "out"]


class UsageError(Exception):
    pass


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, floats to 12 significant digits."""
    return json.dumps(_round_floats(obj), sort_keys=True) + "\n"


def _fmt_float(v: float) -> str:
    return f"{v:.12g}"


def _read_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _add_function_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--table", metavar="PATH", help='truth table JSON {"n": .., "table": [..]}')
    src.add_argument("--anf", metavar="EXPR", help='ANF expression such as "x1*x2 + x3"')
    src.add_argument("--family", choices=["g", "h", "k"], help="named family (needs --n)")
    p.add_argument("--n", type=int, help="arity for --anf and --family")


def _add_common(p: argparse.ArgumentParser, formats=("json", "csv")) -> None:
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--seed", type=int, default=0)


def _load_function(args) -> BooleanFunction:
    if args.table:
        return BooleanFunction.from_json(_read_json(args.table))
    if args.n is None:
        raise UsageError("--n is required with --anf and --family")
    if args.anf is not None:
        return parse_anf(args.anf, args.n)
    return make_family(FamilySpec(args.family, args.n))


def _load_prior(args, n: int) -> PriorDistribution:
    if args.prior in (None, "uniform"):
        return PriorDistribution.uniform(n)
    prior = PriorDistribution.from_json(_read_json(args.prior))
    if prior.n != n:
        raise UsageError("prior arity does not match the function")
    return prior


def cmd_synth(args, out) -> int:
    f = _load_function(args)
    proto = synthesize_protocol(f)
    if args.format == "json":
        out.write(dumps(proto.to_json()))
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["site", "row", "angle_pi"])
        for j, (row, a) in enumerate(zip(proto.P.to_lists(), proto.angles), 1):
            w.writerow([j, format_bits(row), str(a.to_fraction())])
    return 0


def cmd_feasibility(args, out) -> int:
    f = _load_function(args)
    if args.P:
        P = Gf2Matrix.from_lists(_read_json(args.P), f.n)
        out.write(dumps(decide_feasibility(f, P).to_json()))
        return 0
    if args.sites is None:
        raise UsageError("one of --sites or --P is required")
    full = (1 << f.n) - 1
    if not 0 <= args.sites <= full:
        raise UsageError(f"--sites must lie in 0..{full}")
    checked = 0
    witness = None
    for P in iter_row_sets(f.n, args.sites):
        checked += 1
        verdict = decide_feasibility(f, P)
        if verdict.feasible:
            witness = verdict
            break
    report = {
        "n": f.n,
        "sites": args.sites,
        "status": "feasible" if witness else "infeasible",
        "row_sets_checked": checked,
        "verdict": None if witness is None else witness.to_json(),
    }
    out.write(dumps(report))
    return 0


def cmd_bounds(args, out) -> int:
    if args.functional:
        beta = BellFunctional.from_json(_read_json(args.functional))
        label = "custom"
    else:
        f = _load_function(args)
        beta = functional_from_game(f, _load_prior(args, f.n))
        label = args.family or "custom"
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    if args.tol is not None:
        cfg.grad_tol = args.tol
    rep = quantum_bound(beta, cfg)
    if args.format == "json":
        out.write(dumps(rep.to_json()))
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(BOUNDS_CSV_HEADER)
        ratio = rep.quantum / float(rep.classical) if rep.classical else float("inf")
        w.writerow([beta.n, label, format_fraction(rep.classical), _fmt_float(rep.quantum),
                    _fmt_float(ratio), format_fraction(rep.mean_success_classical),
                    _fmt_float(rep.mean_success_quantum)])
    return 0


def cmd_simulate(args, out) -> int:
    f = _load_function(args)
    proto = Protocol.from_json(_read_json(args.protocol)) if args.protocol else synthesize_protocol(f)
    resource = resource_from_json(_read_json(args.resource)) if args.resource else GhzResource(proto.sites)
    if args.x is not None:
        if len(args.x) != f.n or set(args.x) - {"0", "1"}:
            raise UsageError(f"--x must be a string of {f.n} bits")
        inputs = [tuple(int(c) for c in args.x)]
    else:
        inputs = [bits_of(i, f.n) for i in range(1 << f.n)]
    rng = np.random.default_rng(args.seed)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SIMULATE_CSV_HEADER)
    for x in inputs:
        s = bits_of(proto.P.apply(sum(b << j for j, b in enumerate(x))), proto.sites)
        for _ in range(args.shots):
            m, bit = sample_run(proto, resource, x, rng)
            w.writerow([format_bits(x), format_bits(s), format_bits(m), bit])
    return 0


def cmd_emit(args, out) -> int:
    f = _load_function(args)
    beta = functional_from_game(f, _load_prior(args, f.n))
    if args.format == "json":
        out.write(dumps(beta.to_json()))
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["s", "beta"])
        for s, b in enumerate(beta.beta):
            w.writerow([format_bits(bits_of(s, f.n)), format_fraction(b)])
    return 0


def cmd_verify(args, out) -> int:
    results = verify_suite(args.scope, SuiteConfig(seed=args.seed))
    if args.format == "json":
        out.write(dumps([r.to_json() for r in results]))
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["check", "scope", "expected", "measured", "tolerance", "pass"])
        for r in results:
            w.writerow([r.check, r.scope, json.dumps(_round_floats(r.expected)),
                        json.dumps(_round_floats(r.measured)), r.tolerance, int(r.passed)])
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmqc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="deterministic protocol for a Boolean function")
    _add_function_source(p)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("feasibility", help="decide feasibility at a site budget or for a given P")
    _add_function_source(p)
    _add_common(p, ("json",))
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--sites", type=int, help="try every P with this many distinct nonzero rows")
    budget.add_argument("--P", metavar="PATH", help="JSON list of P rows")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("bounds", help="classical and quantum bounds of the game functional")
    _add_function_source(p, required=False)
    p.add_argument("--functional", metavar="PATH", help='functional JSON {"n": .., "beta": [..]}')
    p.add_argument("--prior", default="uniform", help="'uniform' or a prior JSON path")
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--tol", type=float, default=None, help="optimizer gradient tolerance")
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="sample protocol runs; CSV rows x,s,m,out")
    _add_function_source(p)
    p.add_argument("--protocol", metavar="PATH")
    p.add_argument("--resource", metavar="PATH")
    p.add_argument("--x", help="single input bit string x1x2..xn (default: all inputs)")
    p.add_argument("--shots", type=int, default=1)
    _add_common(p, ("csv",))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("emit-inequality", help="Bell functional of the game (f, prior)")
    _add_function_source(p)
    p.add_argument("--prior", default="uniform")
    _add_common(p)
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--scope", default="all",
                   choices=["theorem1", "prop1", "prop2", "prop3", "prop4", "appendixC", "all"])
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "bounds" and not args.functional and not (args.table or args.anf or args.family):
        parser.print_usage(sys.stderr)
        print("nmqc bounds: a function source or --functional is required", file=sys.stderr)
        return 2
    try:
        return args.func(args, out)
    except (UsageError, AnfParseError, ArityError, ValueError, OSError, KeyError) as exc:
        parser.print_usage(sys.stderr)
        print(f"nmqc {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
