"""Heavy-tailed mutation started next to the optimum of the anchored function.

The start has only the heavy first bit wrong. Prints mean iterations / n
for two power-law exponents; with beta = 3 it stays flat, with beta = 1.5
it keeps growing with n.

    python3 scripts/neighborhood_effect.py --ns 256 1024 4096 --trials 200
"""

import argparse

import numpy as np

from unbiased_ea import distributions as dist
from unbiased_ea import engine, objectives, stats


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--ns", type=int, nargs="+", default=[256, 1024, 4096])
    ap.add_argument("--betas", type=float, nargs="+", default=[3.0, 1.5])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'beta':>5} {'n':>6} {'chi':>8} {'mean/n':>9} {'se/n':>8}")
    for beta in args.betas:
        for n in args.ns:
            bits = np.ones(n, dtype=np.uint8)
            bits[0] = 0
            f = objectives.make_anchored(n, float(n))
            d = dist.make_power_law(n, beta)
            cfg = engine.EngineConfig(start=objectives.BitString(bits), seed=engine.trial_seed(args.seed, n))
            s = stats.summarize(engine.iterations(engine.run_batch(f, d, cfg, args.trials, args.workers)))
            print(f"{beta:>5} {n:>6} {d.chi:>8.3f} {s.mean / n:>9.3f} {s.std_error / n:>8.3f}")


if __name__ == "__main__":
    main()
