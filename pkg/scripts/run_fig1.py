"""Rotting 1/t comparison for all three tail shapes.

Writes one CSV per (beta, algo), an SVG per beta and a summary table.

    python scripts/run_fig1.py --horizon 100000 --reps 20 --out-dir results/fig1
"""
import argparse
import json
import math
from pathlib import Path

from banditlab import harness


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--horizon", type=int, default=100_000)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--betas", type=float, nargs="+", default=[0.8, 1.0, 1.2])
    p.add_argument("--out-dir", default="results/fig1")
    args = p.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for beta in args.betas:
        series = {}
        for config in harness.preset_fig1(beta, args.horizon, args.reps, args.seed):
            result = harness.run_experiment(config, workers=args.workers)
            harness.emit_csv(result, out / f"beta{beta}_{config.algo}.csv")
            series[config.algo] = result
            f = result.final_regrets()
            se = f.std(ddof=1) / math.sqrt(len(f)) if len(f) > 1 else 0.0
            summary.setdefault(str(beta), {})[config.algo] = {"mean": float(f.mean()), "se": float(se)}
            print(f"beta={beta:<4} {config.algo:<13} mean final regret {f.mean():9.1f} +- {se:.1f}")
        harness.emit_plot(series, out / f"fig1_beta{beta}.svg")
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)


if __name__ == "__main__":
    main()
