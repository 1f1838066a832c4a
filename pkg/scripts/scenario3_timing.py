"""Timing and constraint check for the p >> n scenario (n=200, p=1000)."""

import time

import numpy as np

from orthogroups.og import constraint_violation, encode_group, fit_og
from orthogroups.simulate import ScenarioSpec, generate
from orthogroups.sog import fit_sog


def main(seed=0):
    spec = ScenarioSpec(3, seed=seed)
    data = generate(spec)
    design = encode_group(data.Z)
    xnorm = np.linalg.norm(data.X)

    t0 = time.perf_counter()
    og = fit_og(data.X, design, 10)
    print(f"OG   k=10: {time.perf_counter() - t0:.3f}s  "
          f"max|Z_aug^T X~|/||X|| = {constraint_violation(og.x_tilde, design).max() / xnorm:.1e}  "
          f"gap = {og.gap:.4g}")

    for frac in (1.0, 0.5, 0.25):
        t = frac * np.sqrt(spec.p)
        t0 = time.perf_counter()
        sog = fit_sog(data.X, design, 5, t=t)
        nnz = np.count_nonzero(sog.U, axis=0)
        print(f"SOG  k=5 t={t:6.2f}: {time.perf_counter() - t0:.3f}s  iters {sog.n_iter}  nonzeros {nnz.tolist()}  "
              f"max|Z_aug^T X~|/||X|| = {constraint_violation(sog.x_tilde, design).max() / xnorm:.1e}")


if __name__ == "__main__":
    main()
