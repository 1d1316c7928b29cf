#!/usr/bin/env python3
"""Emit the shared-vs-single noise comparison curves as CSV.

Columns: delta, single_noise, shared_lower_bound.  The shared-noise column
is the explicit-attack lower bound, with its perfect-guessing plateau from
delta = 1/2 onwards.
"""

import argparse

import numpy as np

from qmrand.jsonio import write_csv
from qmrand.noise_comparison import sweep_curves


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=101)
    parser.add_argument("--output", default="fig3_curves.csv")
    args = parser.parse_args()
    points = sweep_curves(np.linspace(0.0, 1.0, args.points))
    write_csv(
        args.output,
        ["delta", "single_noise", "shared_lower_bound"],
        [(p.delta, p.single_noise_pguess, p.shared_noise_lower_bound) for p in points],
    )
    print(f"wrote {args.points} rows to {args.output}")


if __name__ == "__main__":
    main()
