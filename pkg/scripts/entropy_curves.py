#!/usr/bin/env python3
"""Emit the four conditional-entropy curves of the noisy measurement.

Columns: epsilon, hmax_bound, vn_bound, state_vn_star, hmin_star.  The first
two are the dilation bounds for the measurement; state_vn_star is the
optimal conditional von Neumann entropy of the analogous noisy state, and
hmin_star the shared optimal min-entropy.
"""

import argparse

import numpy as np

from qmrand.entropy import entropy_curve_point
from qmrand.jsonio import write_csv
from qmrand.povm import NoiseModel


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-d", type=int, default=2, help="Hilbert-space dimension")
    parser.add_argument("--points", type=int, default=101)
    parser.add_argument("--output", default=None)
    args = parser.parse_args()
    output = args.output or f"entropy_curves_d{args.d}.csv"
    rows = []
    for eps in np.linspace(0.0, 1.0, args.points):
        row = entropy_curve_point(NoiseModel(args.d, float(eps)))
        rows.append(
            (row["epsilon"], row["hmax_bound"], row["vn_bound"],
             row["state_vn_star"], row["hmin_star"])
        )
    write_csv(
        output, ["epsilon", "hmax_bound", "vn_bound", "state_vn_star", "hmin_star"], rows
    )
    print(f"wrote {args.points} rows to {output}")


if __name__ == "__main__":
    main()
