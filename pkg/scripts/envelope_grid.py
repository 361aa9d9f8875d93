"""Envelope dichotomy table over deg B in {2, 3} and free-node counts {1, 2, 3}."""

import argparse

import numpy as np

from hinfb import BlaschkeProduct, InterpolationProblem, envelope_report


def separated(rng, n, avoid, sep=0.1, radius=0.8):
    out = []
    while len(out) < n:
        z = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if all(abs(z - q) >= sep for q in list(avoid) + out):
            out.append(z)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--random", type=int, default=20, help="extra random configurations")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    cases = [(m, f, 1) for m in (2, 3) for f in (1, 2, 3)]
    for _ in range(args.random):
        m = int(rng.integers(2, 4))
        cases.append((m, int(rng.integers(1, 4)), int(rng.integers(1, m + 1))))
    print(f"{'m':>2} {'n':>2} {'r':>2} {'d':>2} {'alg':>4} {'comm':>4} {'full':>5} {'pred':>5} agree")
    for m, free, r in cases:
        zeros = separated(rng, m, [], radius=0.7)
        nodes = zeros[:r] + separated(rng, free, zeros)
        rep = envelope_report(InterpolationProblem(BlaschkeProduct.from_points(zeros), nodes, np.zeros(len(nodes))))
        print(
            f"{rep['m']:>2} {rep['n']:>2} {rep['r']:>2} {rep['d']:>2} {rep['algebra_dim']:>4} {rep['commutant_dim']:>4}"
            f" {str(rep['is_full']):>5} {str(rep['theorem_prediction']):>5} {rep['agreement']}"
        )


if __name__ == "__main__":
    main()
