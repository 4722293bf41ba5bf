"""Evacuation time against the cost slope for the two-block datum.

Writes the coarse sweep on [0, 20] and the refined sweep on [10, 14] as CSV
and prints the detected jumps.
"""

import argparse
from pathlib import Path

from hughes1d import experiments as ex
from hughes1d.data import two_blocks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results", type=Path)
    ap.add_argument("--particles", type=int, default=500)
    ap.add_argument("--dt", type=float, default=0.004)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for tag, (a, b, h) in {"coarse": (0, 20, 0.1), "fine": (10, 14, 0.05)}.items():
        recs = ex.sweep_alpha(two_blocks(), ex.parameter_grid(a, b, h), args.particles, args.dt, jobs=args.jobs)
        (args.out / f"alpha_{tag}.csv").write_text(ex.records_to_csv(recs))
        jumps = ex.detect_jumps(recs)
        print(f"{tag}: {len(recs)} points, {len(jumps)} jumps")
        for j in jumps:
            print(f"  alpha in ({j.left:g}, {j.right:g}): |dT| = {j.size:.4f}")


if __name__ == "__main__":
    main()
