"""Minimal number of GHZ sites for every Boolean function of small arity.

Prints a histogram of minimal site counts per arity, split by degree, and the
minimal counts for the named families.
"""

import argparse
from collections import Counter

from nmqc.boolfn import all_functions, degree
from nmqc.families import family
from nmqc.synth import minimal_sites_search, synthesize_protocol


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=3)
    args = ap.parse_args(argv)

    for n in range(1, args.n_max + 1):
        hist = Counter()
        for f in all_functions(n):
            m, _ = minimal_sites_search(f)
            hist[degree(f), m, synthesize_protocol(f).sites] += 1
        print(f"n = {n}")
        print("  degree  minimal  parity-basis  count")
        for (d, m, full), count in sorted(hist.items()):
            print(f"  {d:>6}  {m:>7}  {full:>12}  {count:>5}")

    print("families")
    for kind, n in [("g", 2), ("g", 3), ("h", 2), ("h", 3), ("k", 2), ("k", 3)]:
        m, proto = minimal_sites_search(family(kind, n))
        print(f"  {kind}_{n}: {m} sites, rows {proto.P.to_lists()}")


if __name__ == "__main__":
    main()
