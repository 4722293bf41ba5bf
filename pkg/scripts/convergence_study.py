"""Refinement studies on the well-separated exit-block data.

Prints the turning-point speed deviation, the restart gap and the
particle-versus-grid L1 distance for a ladder of particle counts.
"""

import argparse

from hughes1d import experiments as ex
from hughes1d.data import exit_blocks, two_blocks, uneven_exit_blocks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dt", type=float, default=0.004)
    args = ap.parse_args()
    print("N      dxi/dt dev   restart L1   FtL vs Godunov")
    tab = ex.cross_scheme_convergence(exit_blocks(), 1.0, 0.3, (125, 250, 500, 1000), (1 / 800,), args.dt)
    for n, err in zip(tab.particles, tab.errors[:, 0]):
        dev = ex.dotxi_check(uneven_exit_blocks(), 1.0, n, args.dt).max_deviation
        rs = ex.restart_consistency(two_blocks(), 1.0, n, args.dt, 0.2, 0.5)
        print(f"{n:<6d} {dev:11.3e}  {rs:11.3e}  {err:11.3e}")


if __name__ == "__main__":
    main()
