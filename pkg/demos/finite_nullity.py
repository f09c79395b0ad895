"""Hessian nullity as a vertical intersection in finite dimensions.

Cost ``1/2 (s u1^2 + u2^2) + u1 u3`` under the constraint ``u3 = q``.  The
Hessian on the constraint kernel is ``diag(s, 1)``, singular at ``s = 0``,
while the pair stays Morse because the null direction is coupled to the
constraint.  The Lagrangian space of the multiplier equations meets the
vertical exactly at ``s = 0``.
"""
import numpy as np

from maslov_morse.finite import hessian_index_nullity, is_morse_pair, l_space, quadratic_problem, vertical_intersection


def main():
    a = np.array([[0.0, 0.0, 1.0]])
    print("  s   index  nullity  dim(L meet vertical)  Morse pair")
    for s in (-1.0, -0.5, 0.0, 0.5, 1.0):
        h = np.array([[s, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
        prob = quadratic_problem(h, np.zeros(3), a)
        ind, nul = hessian_index_nullity(prob, np.zeros(3), np.zeros(1))
        dim = vertical_intersection(l_space(prob, np.zeros(3), np.zeros(1)))
        morse = is_morse_pair(prob, np.zeros(3), np.zeros(1))
        print(f"{s:5.1f}  {ind:5d}  {nul:7d}  {dim:20d}  {morse}")


if __name__ == "__main__":
    main()
