"""``banditlab`` command line: run, analyze, plot, fig1."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from banditlab import harness
from banditlab.analysis import BUDGET_RULES, SafetyParams, detect_significant_shifts
from banditlab.environment import Trace
from banditlab.errors import ConfigError, UsageError

log = logging.getLogger("banditlab")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

# CLI dest -> ExperimentConfig field
RUN_FIELDS = {
    "algo": "algo", "beta": "beta", "horizon": "horizon", "adversary": "adversary",
    "reps": "reps", "seed": "seed", "c1": "c1", "c2": "c2", "log_exp": "log_exp",
    "subsample_log": "subsample_log", "out": "out", "checkpoint_start": "checkpoint_start",
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="banditlab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run seeded replications and write checkpoint CSV")
    r.add_argument("--config", help="JSON file whose keys mirror the flags; flags override it")
    r.add_argument("--algo", choices=harness.ALGOS)
    r.add_argument("--beta", type=float)
    r.add_argument("--horizon", type=int)
    r.add_argument("--adversary", help="stationary | rotting-1-over-t | abrupt:<file>")
    r.add_argument("--reps", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--c1", type=float)
    r.add_argument("--c2", type=float)
    r.add_argument("--log-exp", dest="log_exp", type=int, choices=(1, 3))
    r.add_argument("--subsample-log", dest="subsample_log", action="store_true", default=None)
    r.add_argument("--checkpoint-start", dest="checkpoint_start", type=int)
    r.add_argument("--out")
    r.add_argument("--trace-out", help="also write the full trace of rep 0")
    r.add_argument("--workers", type=int, default=1)

    a = sub.add_parser("analyze", help="offline analysis of an exported trace")
    a.add_argument("--trace", required=True)
    a.add_argument("--detect-shifts", action="store_true")
    a.add_argument("--beta", type=float, default=1.0)
    a.add_argument("--kappa-inv", dest="kappa_inv", type=float, default=1.0)
    a.add_argument("--budget-rule", dest="budget_rule", choices=BUDGET_RULES, default="windowed")
    a.add_argument("--out", required=True)

    pl = sub.add_parser("plot", help="mean regret with +-1 std bands from run CSVs")
    pl.add_argument("--in", dest="inputs", nargs="+", required=True, help="csv paths, optionally label=path")
    pl.add_argument("--out", required=True)
    pl.add_argument("--loglog", action="store_true")

    f = sub.add_parser("fig1", help="rotting 1/t comparison of blackbox-ucb, elimination, ssucb")
    f.add_argument("--beta", type=float, required=True, choices=(0.8, 1.0, 1.2))
    f.add_argument("--horizon", type=int, default=100_000)
    f.add_argument("--reps", type=int, default=20)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out-dir", dest="out_dir", required=True)
    f.add_argument("--workers", type=int, default=1)
    return p


def _run_config(args) -> harness.ExperimentConfig:
    values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                values = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        if not isinstance(values, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
    for dest, name in RUN_FIELDS.items():
        v = getattr(args, dest)
        if v is not None:
            values[name] = v
    config = harness.ExperimentConfig.from_dict(values)
    if not config.out:
        raise ConfigError("run needs --out (or 'out' in the config file)")
    return config


def cmd_run(args) -> int:
    config = _run_config(args)
    result = harness.run_experiment(config, workers=args.workers)
    harness.emit_csv(result, config.out)
    if args.trace_out:
        harness.replay_trace(config, 0).to_csv(args.trace_out)
    log.info("wrote %d rows to %s", len(result.rows), config.out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    if not Path(args.trace).exists():
        raise FileNotFoundError(args.trace)
    trace = Trace.from_csv(args.trace)
    report: dict = {"rounds": len(trace), "cum_regret": trace.cumulative_regret() if len(trace) else 0.0}
    if args.detect_shifts:
        params = SafetyParams(args.beta, args.kappa_inv)
        report.update(detect_significant_shifts(trace, params, args.budget_rule).to_dict())
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_plot(args) -> int:
    series = {}
    for item in args.inputs:
        label, _, path = item.rpartition("=")
        label = label or Path(path).stem
        series[label] = harness.read_csv(path)
    harness.emit_plot(series, args.out, loglog=args.loglog)
    return EXIT_OK


def cmd_fig1(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series, summary = {}, {}
    for config in harness.preset_fig1(args.beta, args.horizon, args.reps, args.seed):
        result = harness.run_experiment(config, workers=args.workers)
        harness.emit_csv(result, out / f"{config.algo}.csv")
        series[config.algo] = result
        finals = result.final_regrets()
        summary[config.algo] = {
            "mean_final_regret": float(finals.mean()),
            "std_error": float(finals.std(ddof=1) / len(finals) ** 0.5) if len(finals) > 1 else 0.0,
        }
        log.info("%s: mean final regret %.1f", config.algo, finals.mean())
    harness.emit_plot(series, out / f"fig1_beta{args.beta}.svg")
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "analyze": cmd_analyze, "plot": cmd_plot, "fig1": cmd_fig1}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError) as exc:
        print(f"banditlab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"banditlab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"banditlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
