"""Classical and quantum bounds for the named families as a CSV table.

    python3 scripts/bounds_table.py --families g h --n-max 10 > bounds.csv
"""

import argparse
import csv
import sys

from nmqc.bounds import OptimizerConfig, functional_from_game, quantum_bound
from nmqc.cli import BOUNDS_CSV_HEADER
from nmqc.families import FamilySpec, closed_form_bounds, make_family


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--families", nargs="+", default=["g", "h"], choices=["g", "h", "k"])
    ap.add_argument("--n-min", type=int, default=2)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--restarts", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--closed-form", action="store_true", help="append closed-form c and q columns")
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(BOUNDS_CSV_HEADER + (["c_closed", "q_closed"] if args.closed_form else []))
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    for kind in args.families:
        for n in range(args.n_min, args.n_max + 1):
            spec = FamilySpec(kind, n)
            rep = quantum_bound(functional_from_game(make_family(spec)), cfg)
            c = rep.classical
            row = [n, kind, f"{c.numerator}/{c.denominator}", f"{rep.quantum:.12g}",
                   f"{rep.quantum / float(c):.12g}",
                   f"{rep.mean_success_classical.numerator}/{rep.mean_success_classical.denominator}",
                   f"{rep.mean_success_quantum:.12g}"]
            if args.closed_form:
                cf = closed_form_bounds(spec)
                row += [f"{cf.c.numerator}/{cf.c.denominator}", f"{cf.q:.12g}"]
            w.writerow(row)


if __name__ == "__main__":
    main()
