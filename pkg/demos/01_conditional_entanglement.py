"""How a remote measurement setting steers two-particle entanglement.

Start from a three-particle triorthogonal state, measure particle 3 along a
direction that tilts from the z axis to the equator, and watch the Schmidt
coefficients of the left-behind pair move from product-state (1, 0) toward
maximal entanglement (1/sqrt(2), 1/sqrt(2)).
"""

from math import pi, sqrt

import numpy as np

from belllab import Direction, TriorthogonalSpec, condition_on, make_triorthogonal

INV_SQRT2 = 1 / sqrt(2)


def schmidt_coefficients(state):
    return np.linalg.svd(state.amplitudes.reshape(2, 2), compute_uv=False)


def main():
    spec = TriorthogonalSpec(3, INV_SQRT2, INV_SQRT2, (1, 1, 1))
    psi = make_triorthogonal(spec)

    print("GHZ state, particle 3 measured along (theta3, phi3=0), outcome +1")
    print(f"{'theta3':>10} {'p+':>10} {'s1':>10} {'s2':>10}")
    for frac in np.linspace(0.0, 1.0, 11):
        theta3 = frac * pi / 2
        res = condition_on(psi, {3: (Direction(theta3, 0.0), +1)})
        s1, s2 = schmidt_coefficients(res.state)
        print(f"{theta3:10.4f} {res.probability:10.6f} {s1:10.6f} {s2:10.6f}")

    print()
    print("The same tilt applied to a lopsided state (c1=0.6, c2=0.8):")
    spec = TriorthogonalSpec(3, 0.6, 0.8, (1, 1, 1))
    psi = make_triorthogonal(spec)
    for frac in (0.0, 0.5, 1.0):
        theta3 = frac * pi / 2
        res = condition_on(psi, {3: (Direction(theta3, 0.0), +1)})
        s1, s2 = schmidt_coefficients(res.state)
        print(f"  theta3={theta3:.4f}: p+={res.probability:.6f}, "
              f"schmidt=({s1:.6f}, {s2:.6f})")
    print()
    print("Even at the equator the lopsided state never reaches (0.7071, 0.7071):")
    print("only |c1| = |c2| leaves behind a maximally entangled pair.")


if __name__ == "__main__":
    main()
