"""Experiment orchestration: configs, seeded replications, CSV and SVG output."""
from __future__ import annotations

import csv
import dataclasses
import functools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from banditlab import rng
from banditlab.agents import DEFAULT_C1, DEFAULT_C2, Agent, BlackboxAgent, EliminationAgent, SSUCBAgent
from banditlab.base_policies import UCB, UCB_EXPLORATION, SuccessiveElimination
from banditlab.environment import AbruptSchedule, Adversary, Environment, RottingGlobalRate, Stationary
from banditlab.errors import ConfigError
from banditlab.reservoir import BetaRegularReservoir
from banditlab.rng import UniformStream

ALGOS = ("blackbox-ucb", "blackbox-se", "elimination", "ssucb")
CSV_HEADER = ("rep", "round", "cum_regret", "episodes", "V", "L", "V_R", "L_R")


@dataclass
class ExperimentConfig:
    algo: str
    beta: float
    horizon: int
    adversary: str = "stationary"
    reps: int = 1
    seed: int = 0
    c1: float = DEFAULT_C1
    c2: float = DEFAULT_C2
    log_exp: int = 1
    subsample_log: bool = False
    max_term: bool = True
    truncate_subsample: bool = False
    per_arm_rate: bool = False
    exploration: float = UCB_EXPLORATION
    checkpoint_start: int = 10
    out: str | None = None

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.algo not in ALGOS:
            raise ConfigError(f"algo must be one of {', '.join(ALGOS)}; got {self.algo!r}")
        if not (isinstance(self.beta, (int, float)) and self.beta > 0):
            raise ConfigError(f"beta must be a positive number; got {self.beta!r}")
        if not (isinstance(self.horizon, int) and self.horizon >= 2):
            raise ConfigError(f"horizon must be an integer >= 2; got {self.horizon!r}")
        if not (isinstance(self.reps, int) and self.reps >= 1):
            raise ConfigError(f"reps must be an integer >= 1; got {self.reps!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be an unsigned 64-bit integer; got {self.seed!r}")
        if self.log_exp not in (1, 3):
            raise ConfigError(f"log_exp must be 1 or 3; got {self.log_exp!r}")
        for name in ("c1", "c2", "exploration"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive; got {getattr(self, name)!r}")
        adversary_name(self.adversary)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
        missing = {"algo", "beta", "horizon"} - set(d)
        if missing:
            raise ConfigError(f"missing config fields: {', '.join(sorted(missing))}")
        return cls(**d)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def adversary_name(text: str) -> str:
    kind = text.split(":", 1)[0]
    if kind not in ("stationary", "rotting-1-over-t", "abrupt"):
        raise ConfigError(f"adversary must be stationary, rotting-1-over-t or abrupt:<file>; got {text!r}")
    if kind == "abrupt" and not text[len("abrupt:"):]:
        raise ConfigError("abrupt adversary needs a schedule file: abrupt:<file>")
    return kind


def make_adversary(config: ExperimentConfig) -> Adversary:
    kind = adversary_name(config.adversary)
    if kind == "stationary":
        return Stationary()
    if kind == "rotting-1-over-t":
        return RottingGlobalRate(1.0, per_arm=config.per_arm_rate)
    path = config.adversary[len("abrupt:"):]
    try:
        return AbruptSchedule.from_json(path)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad abrupt schedule {path}: {exc}") from exc


def make_agent(config: ExperimentConfig, rep: int) -> Agent:
    beta, T = config.beta, config.horizon
    if config.algo in ("blackbox-ucb", "blackbox-se"):
        policy = UCB if config.algo == "blackbox-ucb" else SuccessiveElimination
        return BlackboxAgent(
            beta, T,
            base=functools.partial(policy, exploration=config.exploration),
            c1=config.c1, log_exp=config.log_exp, max_term=config.max_term,
            truncate_subsample=config.truncate_subsample,
        )
    if config.algo == "elimination":
        return EliminationAgent(
            beta, T, UniformStream.for_run(config.seed, rep, rng.AGENT),
            c2=config.c2, include_log=config.subsample_log,
            truncate_subsample=config.truncate_subsample,
        )
    return SSUCBAgent(beta, T, config.exploration)


def checkpoints(horizon: int, start: int = 10) -> list[int]:
    """Powers of two from ``2**start`` below the horizon, then the horizon."""
    out = []
    k = start
    while 2**k < horizon:
        out.append(2**k)
        k += 1
    out.append(horizon)
    return out


def make_environment(config: ExperimentConfig, rep: int) -> Environment:
    return Environment(
        BetaRegularReservoir(config.beta),
        config.horizon,
        make_adversary(config),
        UniformStream.for_run(config.seed, rep, rng.RESERVOIR),
        UniformStream.for_run(config.seed, rep, rng.REWARD),
    )


def run_replication(config: ExperimentConfig, rep: int) -> list[tuple]:
    env = make_environment(config, rep)
    agent = make_agent(config, rep)
    cps = checkpoints(config.horizon, config.checkpoint_start)
    rows = []
    j = 0
    nxt = cps[0]
    while env.round < env.horizon:
        agent.step(env)
        if env.round == nxt:
            tr = env.tracker
            rows.append((rep, nxt, env.cum_regret, agent.episode, tr.V, tr.L, tr.V_R, tr.L_R))
            j += 1
            nxt = cps[j] if j < len(cps) else -1
    return rows


def _run_rep(args):
    config, rep = args
    return run_replication(config, rep)


@dataclass
class RunResult:
    config: ExperimentConfig | None
    rows: list[tuple] = field(default_factory=list)

    def rounds(self) -> list[int]:
        return sorted({r[1] for r in self.rows})

    def regret_matrix(self) -> tuple[list[int], np.ndarray]:
        """Checkpoint rounds and a (reps, checkpoints) regret array ordered by rep."""
        rounds = self.rounds()
        reps = sorted({r[0] for r in self.rows})
        col = {c: j for j, c in enumerate(rounds)}
        row = {p: i for i, p in enumerate(reps)}
        out = np.full((len(reps), len(rounds)), np.nan)
        for r in self.rows:
            out[row[r[0]], col[r[1]]] = r[2]
        return rounds, out

    def aggregate(self) -> list[dict]:
        rounds, mat = self.regret_matrix()
        out = []
        for j, c in enumerate(rounds):
            v = mat[:, j]
            std = float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
            out.append({"round": c, "mean": float(np.mean(v)), "std": std, "n": int(len(v))})
        return out

    def final_regrets(self) -> np.ndarray:
        _, mat = self.regret_matrix()
        return mat[:, -1]


def run_experiment(config: ExperimentConfig, workers: int = 1) -> RunResult:
    """Run every replication and collect checkpoint rows ordered by rep.

    Rep ``i`` draws from streams keyed by ``(seed, i, purpose)``, so the
    output does not depend on ``workers``.
    """
    config.validate()
    jobs = [(config, i) for i in range(config.reps)]
    if workers <= 1 or config.reps == 1:
        parts = [_run_rep(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_rep, jobs))
    rows = [row for part in parts for row in part]
    return RunResult(config, rows)


def preset_fig1(
    beta: float, horizon: int = 100_000, reps: int = 20, seed: int = 0
) -> list[ExperimentConfig]:
    """Blackbox-UCB, elimination (no log factor in the subsample) and SSUCB on
    the 1/t rotting adversary, sharing seeds."""
    if beta not in (0.8, 1.0, 1.2):
        raise ConfigError(f"fig1 presets exist for beta in 0.8, 1.0, 1.2; got {beta!r}")
    common = dict(beta=beta, horizon=horizon, adversary="rotting-1-over-t", reps=reps, seed=seed)
    return [
        ExperimentConfig(algo="blackbox-ucb", **common),
        ExperimentConfig(algo="elimination", subsample_log=False, **common),
        ExperimentConfig(algo="ssucb", **common),
    ]


# ---------------------------------------------------------------------- output


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def emit_csv(result: RunResult, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in result.rows:
            w.writerow([_fmt(x) for x in row])


def read_csv(path: str | Path) -> RunResult:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise ConfigError(f"{path}: not a run CSV (header {header!r})")
        for r in reader:
            rows.append((int(r[0]), int(r[1]), float(r[2]), int(r[3]), float(r[4]), int(r[5]), float(r[6]), int(r[7])))
    return RunResult(None, rows)


def emit_plot(series: dict[str, RunResult], path: str | Path, loglog: bool = False) -> None:
    """Mean cumulative regret per series with +-1 std bands, as standalone SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.fonttype": "none", "svg.hashsalt": "banditlab"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, result in series.items():
            agg = result.aggregate()
            x = np.array([a["round"] for a in agg], dtype=float)
            m = np.array([a["mean"] for a in agg])
            s = np.array([a["std"] for a in agg])
            (line,) = ax.plot(x, m, marker="o", ms=3, label=label, gid=f"series-{label}")
            ax.fill_between(x, np.maximum(m - s, 1e-9 if loglog else -math.inf), m + s, alpha=0.2, color=line.get_color())
        if loglog:
            ax.set_xscale("log", base=2)
            ax.set_yscale("log", base=2)
        ax.set_xlabel("round")
        ax.set_ylabel("cumulative regret")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def write_config(config: ExperimentConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")


def replay_trace(config: ExperimentConfig, rep: int = 0):
    """Re-run one replication and return its full trace (identical to the rows
    ``run_experiment`` produced for that rep)."""
    env = make_environment(config, rep)
    make_agent(config, rep).run(env)
    return env.trace
