"""Log-log slope of mean final regret against the horizon on a stationary
instance, one fresh run per horizon.

    python scripts/stationary_scaling.py --algos blackbox-ucb elimination ssucb
"""
import argparse

import numpy as np

from banditlab import harness


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--algos", nargs="+", default=["blackbox-ucb", "elimination", "ssucb"])
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--min-exp", type=int, default=10)
    p.add_argument("--max-exp", type=int, default=16)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c1", type=float, default=harness.DEFAULT_C1)
    p.add_argument("--c2", type=float, default=harness.DEFAULT_C2)
    args = p.parse_args()

    horizons = [2**k for k in range(args.min_exp, args.max_exp + 1)]
    target = args.beta / (args.beta + 1)
    for algo in args.algos:
        means = []
        for T in horizons:
            c = harness.ExperimentConfig(
                algo=algo, beta=args.beta, horizon=T, reps=args.reps, seed=args.seed, c1=args.c1, c2=args.c2
            )
            means.append(harness.run_experiment(c).final_regrets().mean())
        slope = np.polyfit(np.log2(horizons), np.log2(means), 1)[0]
        cells = " ".join(f"{m:8.1f}" for m in means)
        print(f"{algo:<13} slope {slope:.3f} (T^{target:.3f} reference)  regrets: {cells}")


if __name__ == "__main__":
    main()
