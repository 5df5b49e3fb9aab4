"""SSR and LSSR of the four two-class distributions over several seeds.

Prints the seed-0 values next to the reference ones, then the spread over
``--seeds`` independent samples so sampling noise is visible.
"""
import argparse

import numpy as np

from lnnet.datasets import BENCHMARK_PAIRS, gen_benchmark_pair
from lnnet.ssr import ClassPair, lssr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=256, help="samples per class")
    ap.add_argument("--seeds", type=int, default=200)
    args = ap.parse_args()

    print(f"{'row':4} {'ref SSR':>8} {'seed0':>8} {'mean':>8} {'sd':>7} {'in tol':>7}   "
          f"{'ref LSSR':>8} {'seed0':>8} {'mean':>8} {'sd':>7} {'in tol':>7}")
    for row, ref in sorted(BENCHMARK_PAIRS.items()):
        vals = np.array([[r.ssr, r.lssr] for r in
                         (lssr(ClassPair.from_dataset(gen_benchmark_pair(row, args.m, s))) for s in range(args.seeds))])
        within = np.abs(vals - [ref["ssr"], ref["lssr"]]) <= 0.05
        cols = []
        for k, key in enumerate(("ssr", "lssr")):
            cols.append(f"{ref[key]:8.4f} {vals[0, k]:8.4f} {vals[:, k].mean():8.4f} "
                        f"{vals[:, k].std():7.4f} {within[:, k].mean():7.1%}")
        print(f"{row:4} " + "   ".join(cols))


if __name__ == "__main__":
    main()
