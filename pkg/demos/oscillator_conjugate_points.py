"""Conjugate points and Morse indices of the harmonic oscillator.

The second variation of ``1/2 (v^2 - q^2)`` with fixed ends loses
positivity each time the horizon passes a multiple of pi.  This script
sweeps the horizon, prints the crossing-count index next to the Hessian
eigencount, and lists the detected conjugate points.
"""
import numpy as np

from maslov_morse import conjugate_point_times, oscillator, piecewise_index, uniform_partition


def main():
    print("horizon/pi  crossing-index  oracle-index")
    for t1 in np.pi * np.array([0.5, 0.9, 1.1, 1.5, 1.9, 2.1, 2.5]):
        rep = piecewise_index(oscillator(t1), uniform_partition(t1, 64), oracle=True)
        print(f"{t1 / np.pi:10.2f}  {rep.piecewise_index:14d}  {rep.oracle_index:12d}")

    t1 = 2.5 * np.pi
    hits = conjugate_point_times(oscillator(t1), uniform_partition(t1, 256))
    print("\nconjugate points on [0, 2.5 pi] with 256 intervals:")
    for t, mult in hits:
        print(f"  t = {t:.4f} (t/pi = {t / np.pi:.4f}), multiplicity {mult}")


if __name__ == "__main__":
    main()
