"""Grouped-LN Hessian measure against plain LN over dimensions and group counts."""
import argparse

import numpy as np

from lnnet.nonlinearity import group_ratios_closed, hessian_measure_fd, hessian_measure_lng_closed
from lnnet.rng import SplitMix64


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="8,16,32")
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--fd-samples", type=int, default=20, help="inputs checked against finite differences")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'d':>3} {'g':>3} {'min ratio':>10} {'median':>8} {'max FD rel err':>15}")
    for d in (int(t) for t in args.dims.split(",")):
        X = SplitMix64(args.seed + d).normal(d * args.samples).reshape(args.samples, d).T
        for g in (g for g in range(1, d + 1) if d % g == 0 and d // g > 2):
            r = group_ratios_closed(X, g)
            fd_err = max(abs(hessian_measure_fd(X[:, k], g) / hessian_measure_lng_closed(X[:, k], g) - 1)
                         for k in range(min(args.fd_samples, args.samples)))
            print(f"{d:3d} {g:3d} {r.min():10.4f} {np.median(r):8.4f} {fd_err:15.2e}")


if __name__ == "__main__":
    main()
