"""Depth, accuracy and wall time of LN-Net synthesis on random labelings."""
import argparse
import time

import numpy as np

from lnnet.datasets import gen_random_labels
from lnnet.synthesis import synthesize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="8,32,128")
    ap.add_argument("--dims", default="2,10")
    ap.add_argument("--classes", default="2,3,5")
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()

    print(f"{'C':>2} {'m':>4} {'d':>3} {'acc':>6} {'mean depth':>10} {'max depth':>9} {'retries':>7} {'time':>7}")
    for c in (int(t) for t in args.classes.split(",")):
        for m in (int(t) for t in args.sizes.split(",")):
            for d in (int(t) for t in args.dims.split(",")):
                t0 = time.perf_counter()
                res = [synthesize(gen_random_labels(m, d, c, s), s) for s in range(args.seeds)]
                dt = time.perf_counter() - t0
                depth = np.array([r.depth for r in res])
                print(f"{c:2d} {m:4d} {d:3d} {min(r.accuracy for r in res):6.3f} {depth.mean():10.1f} "
                      f"{depth.max():9d} {sum(r.attempt > 0 for r in res):7d} {dt:6.2f}s")


if __name__ == "__main__":
    main()
