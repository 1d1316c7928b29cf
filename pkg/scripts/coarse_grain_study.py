#!/usr/bin/env python3
"""Coarse-graining study: Eve should inflate, not coarse-grain, her attack.

For even d, Alice merges the outcomes of the noisy projective measurement
into two halves.  This tabulates, over an epsilon grid: the coarse-grained
measurement's optimal guessing probability (equal to the qubit value), the
inflated-attack value that achieves it, Eve's strictly suboptimal
coarse-grained attack, and optionally the SDP value as a numerical check.
"""

import argparse

import numpy as np

from qmrand.closed_form import pguess_star_qubit_two_outcome
from qmrand.decompositions import coarse_grained_attack_value
from qmrand.povm import NoiseModel, coarse_grain, halves_partition, noisy_projective, unbiased_state
from qmrand.sdp import PrimalProblem, solve_primal


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-d", type=int, default=4, help="even dimension >= 4")
    parser.add_argument("--points", type=int, default=19)
    parser.add_argument("--sdp", action="store_true", help="also solve the SDP at each point")
    args = parser.parse_args()
    print("epsilon,optimal,coarse_grained_attack,gap,sdp_value")
    for eps in np.linspace(0.05, 0.95, args.points):
        eps = float(eps)
        optimal = pguess_star_qubit_two_outcome(noisy_projective(2, eps)).pguess
        cg = coarse_grained_attack_value(NoiseModel(args.d, eps))
        sdp_val = ""
        if args.sdp and args.d <= 8:
            povm = coarse_grain(noisy_projective(args.d, eps), halves_partition(args.d))
            sdp_val = f"{solve_primal(PrimalProblem(povm, unbiased_state(args.d))).value:.9f}"
        print(f"{eps:.3f},{optimal:.9f},{cg:.9f},{optimal - cg:.3e},{sdp_val}")


if __name__ == "__main__":
    main()
