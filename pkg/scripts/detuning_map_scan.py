"""Scan the (Delta_P, Delta_S) plane and summarise the return-to-ground lines.

Prints, for the diagonal Delta_P = Delta_S and the column Delta_P = 0, the
final excited population P2+P3 and the peak P2.
"""
import argparse
import sys

import numpy as np

from adiapulse.sweep import GridSpec, detuning_map, fig4_template


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-points", type=int, default=41)
    ap.add_argument("--range", type=float, nargs=2, default=(-20.0, 20.0))
    ap.add_argument("--tau", type=float, default=6.5)
    ap.add_argument("--omega0", type=float, default=20.0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args(argv)

    grid = GridSpec.square("delta_p", "delta_s", *args.range, args.n_points)
    template = fig4_template(args.tau, args.omega0)
    final = detuning_map("P2_plus_P3_final", template, grid, args.workers)
    peak = detuning_map("P2_at_peak", template, grid, args.workers)
    v = grid.x_values
    zero = int(np.argmin(np.abs(v)))
    print(f"{'delta':>8} {'diag final':>11} {'diag peak':>10} {'dp=0 final':>11}")
    for i, d in enumerate(v):
        print(f"{d:8.2f} {final.values[i, i]:11.4f} {peak.values[i, i]:10.4f} "
              f"{final.values[i, zero]:11.4f}")
    print(f"failed points: {final.failed + peak.failed}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
