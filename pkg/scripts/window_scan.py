"""Scan the n-tuple AND inequality for room above the classical bound.

For each n, prints the window test cos(pi/2n) > 1 - 2^(2-n), the classical
bound (2^n - 2)/2^n and the optimizer's quantum estimate.
"""

import argparse
import math

from nmqc.bounds import OptimizerConfig, appendix_c_window, functional_from_game, quantum_bound
from nmqc.families import family


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--optimize-up-to", type=int, default=10)
    ap.add_argument("--restarts", type=int, default=200)
    args = ap.parse_args(argv)

    print(f"{'n':>3} {'cos(pi/2n)':>12} {'1-2^(2-n)':>12} {'window':>7} {'c':>14} {'q':>14}")
    for n in range(2, args.n_max + 1):
        lhs, rhs = math.cos(math.pi / (2 * n)), 1 - 2.0 ** (2 - n)
        q = "-"
        c = ((1 << n) - 2) / (1 << n)
        if n <= args.optimize_up_to:
            rep = quantum_bound(functional_from_game(family("g", n)), OptimizerConfig(restarts=args.restarts))
            q = f"{rep.quantum:.10f}"
            c = float(rep.classical)
        print(f"{n:>3} {lhs:>12.8f} {rhs:>12.8f} {str(appendix_c_window(n)):>7} {c:>14.10f} {q:>14}")


if __name__ == "__main__":
    main()
