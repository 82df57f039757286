"""Leading constant of SBM (c = 1) on OneMax, BinVal and a random linear function.

Prints ``mean * p1 / (n ln n)`` per objective and size; the ratios should
approach 1 from below.

    python3 scripts/headline_law.py --ns 250 500 1000 2000 --trials 500 --workers 4
"""

import argparse
import math

import numpy as np

from unbiased_ea import distributions as dist
from unbiased_ea import engine, objectives, stats


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--ns", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'objective':>14} {'n':>6} {'mean':>12} {'se':>9} {'ratio':>7}")
    for n in args.ns:
        d = dist.make_standard_bit_mutation(n, args.c)
        weights = np.random.default_rng(args.seed + n).uniform(1, 10, n)
        fs = {
            "onemax": objectives.make_onemax(n),
            "binval": objectives.make_binval(n),
            "random_linear": objectives.make_linear(weights),
        }
        for k, (name, f) in enumerate(fs.items()):
            cfg = engine.EngineConfig(seed=engine.trial_seed(args.seed, 16 * n + k))
            s = stats.summarize(engine.iterations(engine.run_batch(f, d, cfg, args.trials, args.workers)))
            ratio = s.mean * d.p1 / (n * math.log(n))
            print(f"{name:>14} {n:>6} {s.mean:>12.1f} {s.std_error:>9.1f} {ratio:>7.4f}")


if __name__ == "__main__":
    main()
