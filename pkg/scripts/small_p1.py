"""Runtime of D = (p1, 1 - p1) on 2-bit flips when p1 = n^-c is small.

Compares the simulated ``mean * p1 / (n ln n)`` with the exact level-chain
value (uniform start) and the limit ``1 - c / 2``.

    python3 scripts/small_p1.py --n 10000 --c 0.5 --trials 30
"""

import argparse
import math

import numpy as np

from unbiased_ea import distributions as dist
from unbiased_ea import engine, objectives, oracle, stats


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--c", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-sim", action="store_true", help="only evaluate the exact chain")
    args = ap.parse_args()

    n = args.n
    p1 = n**-args.c
    probs = np.zeros(n + 1)
    probs[1], probs[2] = p1, 1 - p1
    d = dist.make_custom(n, probs)
    f = objectives.make_onemax(n)
    scale = p1 / (n * math.log(n))

    exact = oracle.level_chain(f, d).uniform_start_mean()
    print(f"n={n} p1={p1:.4g} limit={1 - args.c / 2:.3f}")
    print(f"chain   ratio {exact * scale:.4f}")
    if not args.no_sim:
        recs = engine.run_batch(f, d, engine.EngineConfig(seed=args.seed), args.trials, args.workers)
        s = stats.summarize(engine.iterations(recs))
        print(f"sim     ratio {s.mean * scale:.4f} +- {s.std_error * scale:.4f}")


if __name__ == "__main__":
    main()
