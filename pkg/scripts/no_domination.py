"""Exact hitting times showing that starting closer can be slower.

Part 1: OneMax with D = (p1 = n^-2, p2 = 1 - n^-2); expected time from
distance 1 versus distance 2.
Part 2: with D = (n^-3, 1/n, rest) on up to three flips, the anchored
function ``3 x_1 + sum x_i`` beats OneMax from (0, 1, ..., 1).
"""

import argparse

import numpy as np

from unbiased_ea import distributions as dist
from unbiased_ea import objectives, oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--m", type=int, default=14)
    args = ap.parse_args()

    n = args.n
    probs = np.zeros(n + 1)
    probs[1], probs[2] = n**-2, 1 - n**-2
    sol = oracle.level_chain(objectives.make_onemax(n), dist.make_custom(n, probs))
    print(f"n={n}: E[T | distance 1] = {sol.time_from(n - 1):.6f}")
    print(f"n={n}: E[T | distance 2] = {sol.time_from(n - 2):.6f}")

    m = args.m
    probs = np.zeros(m + 1)
    probs[1], probs[2] = m**-3, 1 / m
    probs[3] = 1 - probs[1] - probs[2]
    d = dist.make_custom(m, probs)
    anch = oracle.compressed_anchored_chain(3.0, m, d).time_from(m - 1)
    om = oracle.level_chain(objectives.make_onemax(m), d).time_from(m - 1)
    print(f"m={m}: anchored(3) {anch:.3f}  onemax {om:.3f}")


if __name__ == "__main__":
    main()
