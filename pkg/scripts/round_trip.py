"""Decompose seeded random instances per case and report residuals, atom counts and timing."""
import argparse
import time
from dataclasses import dataclass

import numpy as np

from sepcones.cones import TensorElement
from sepcones.generate import sample
from sepcones.separability import Undecided, decompose, decompose_s2qn, verify_decomposition


@dataclass
class Config:
    reps: int = 50
    kind: str = "separable"
    seed0: int = 0


TARGETS = [("tensor", m, n) for m, n in [(3, 2), (3, 3), (3, 4), (3, 5), (4, 2), (4, 3), (5, 2), (5, 3),
                                         (6, 2), (6, 3)]] + [("hankel", "H", n) for n in (1, 2, 3, 4)]


def run_target(target, cfg: Config):
    res, atoms, undecided = [], [], 0
    t = time.perf_counter()
    for seed in range(cfg.seed0, cfg.seed0 + cfg.reps):
        B = sample(target, cfg.kind, seed)
        try:
            if isinstance(B, TensorElement):
                D = decompose(B, seed=seed)
                res.append(verify_decomposition(B, D).residual)
            else:
                D = decompose_s2qn(B)
                res.append(verify_decomposition(B.assemble(), D).residual)
            atoms.append(len(D.atoms))
        except Undecided:
            undecided += 1
    dt = (time.perf_counter() - t) / cfg.reps
    return max(res, default=np.nan), np.mean(atoms) if atoms else np.nan, undecided, dt


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--reps", type=int, default=Config.reps)
    p.add_argument("--kind", choices=["separable", "ppt", "boundary"], default=Config.kind)
    p.add_argument("--seed0", type=int, default=Config.seed0)
    cfg = Config(**vars(p.parse_args()))
    print(f"{'case':<18} {'worst residual':>14} {'mean atoms':>10} {'undecided':>9} {'ms/inst':>8}")
    for target in TARGETS:
        worst, mean_atoms, und, dt = run_target(target, cfg)
        name = f"E{target[1]} (x) S({target[2]})" if target[0] == "tensor" else f"S(2) (x) Q({target[2]})"
        print(f"{name:<18} {worst:>14.2e} {mean_atoms:>10.1f} {und:>9d} {1e3 * dt:>8.1f}")


if __name__ == "__main__":
    main()
