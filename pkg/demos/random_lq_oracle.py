"""Crossing counts against brute-force Hessian eigencounts on random data.

Draws random piecewise-constant Jacobi data with indefinite control
Hessians and compares the index read off the Lagrangian curve with the
negative eigencount of the discretized second variation.
"""
import numpy as np

from maslov_morse.checks import random_jacobi_instance
from maslov_morse.morse import piecewise_index


def main(trials=50, seed=1):
    rng = np.random.default_rng(seed)
    agree = 0
    for t in range(trials):
        problem, part = random_jacobi_instance(rng, n_max=3, k_max=3)
        rep = piecewise_index(problem, part, oracle=True)
        agree += rep.matches_oracle
        if t < 8:
            print(f"n={problem.n} k={problem.k} N={len(part) - 1:2d}  crossings={rep.crossing_index:3d} "
                  f"local={sum(rep.local_terms):2d}  index={rep.piecewise_index:3d}  oracle={rep.oracle_index:3d}")
    print(f"\n{agree}/{trials} instances agree with the oracle")


if __name__ == "__main__":
    main()
