"""Ranks of extreme rays of the PPT cones Gamma_{m,n} reached by random face descent.

For each (m, n) a PPT sample is pushed down to an extreme ray. These cones all
equal their separable cones, so every extreme ray should be a single atom of
rank 1 in each constraint.
"""
import argparse
from collections import Counter

import numpy as np

from sepcones.generate import sample
from sepcones.separability import gamma_cone


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--reps", type=int, default=20)
    args = p.parse_args()
    for m, n in [(3, 3), (4, 3), (5, 3), (6, 3), (6, 2)]:
        cone = gamma_cone(m, n)
        hist = Counter()
        for seed in range(args.reps):
            x = sample(("tensor", m, n), "ppt", seed).vector()
            e = cone.descend(x, rng=np.random.default_rng(seed))
            hist[tuple(cone.ranks(e))] += 1
        atoms = sum(c for r, c in hist.items() if max(r) == 1)
        print(f"Gamma_{m},{n}: dim {cone.dim}, extreme ranks {dict(sorted(hist.items()))}, "
              f"{atoms}/{args.reps} rank one")


if __name__ == "__main__":
    main()
