"""Scan t for B = z^2, nodes (0, 0.5), targets (0, t): sweep verdict against the quotient norm 4t."""

import argparse
import csv
import sys

import numpy as np

from hinfb import BlaschkeProduct, InterpolationProblem, QuotientElement, build_compression, feasibility_sweep, quotient_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=0.2)
    ap.add_argument("--hi", type=float, default=0.3)
    ap.add_argument("--steps", type=int, default=21)
    ap.add_argument("--csv", default=None, help="write rows here instead of stdout")
    args = ap.parse_args()
    B = BlaschkeProduct.monomial(2)
    comp = build_compression(InterpolationProblem(B, [0, 0.5], [0, 0]))
    fh = open(args.csv, "w", newline="") if args.csv else sys.stdout
    out = csv.writer(fh)
    out.writerow(["t", "quotient_norm", "status", "min_lambda", "sup_norm"])
    for t in np.linspace(args.lo, args.hi, args.steps):
        v = feasibility_sweep(InterpolationProblem(B, [0, 0.5], [0, t]))
        nrm = quotient_norm(QuotientElement(0, [t]), comp)
        out.writerow([f"{t:.6f}", f"{nrm:.12g}", v.status, f"{v.min_lambda:.6e}", f"{v.sup_norm:.12g}"])
    if args.csv:
        fh.close()


if __name__ == "__main__":
    main()
