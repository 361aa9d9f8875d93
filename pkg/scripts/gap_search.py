"""Search for 2x2 matrix targets that pass the all-v Pick test yet have quotient norm above 1."""

import argparse
import json
import time

import numpy as np

from hinfb import BlaschkeProduct, InterpolationProblem, matrix_gap_search
from hinfb.cli import dumps, gap_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--out", default=None, help="write all found instances as a JSON list")
    args = ap.parse_args()
    template = InterpolationProblem(
        BlaschkeProduct.monomial(2), [0, 0.6, -0.3 + 0.5j, -0.4 - 0.45j], np.zeros((4, 2, 2))
    )
    found = []
    for seed in args.seeds:
        t0 = time.perf_counter()
        res = matrix_gap_search(template, seed, k=2, budget=args.budget)
        dt = time.perf_counter() - t0
        if res.found:
            print(f"seed {seed}: norm {res.quotient_norm:.6f}, sweep margin {res.sweep_margin:.2e}, {res.evaluated} evaluated, {dt:.1f} s")
            found.append(gap_fixture(res))
        else:
            print(f"seed {seed}: nothing in {res.evaluated} evaluations (best ratio {res.ratio:.4f}), {dt:.1f} s")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(found) + "\n")


if __name__ == "__main__":
    main()
