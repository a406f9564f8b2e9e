"""Infinite arm pool with a rested adaptive adversary.

Rounds are numbered from 1. Arms are identified by their 0-based sampling
order. After the reward of round ``t`` is emitted, the adversary may move the
mean of the arm played at ``t`` (and only that arm); every such move is logged
as a sparse change event ``(t, arm, new_mean)`` meaning that the arm has mean
``new_mean`` from round ``t + 1`` on.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from banditlab.errors import DomainError, UsageError
from banditlab.reservoir import BetaRegularReservoir, RewardModel
from banditlab.rng import UniformStream


class RoundOutcome(NamedTuple):
    round: int
    arm: int
    mean_at_play: float
    reward: float
    instantaneous_regret: float


@dataclass
class MeasureTracker:
    """Realized non-stationarity along the played-arm sequence."""

    V: float = 0.0
    L: int = 0
    V_R: float = 0.0
    L_R: int = 0

    def record(self, drop: float) -> None:
        """Account for one change of the played arm; ``drop = before - after``."""
        if drop == 0.0:
            return
        self.V += abs(drop)
        self.L += 1
        if drop > 0.0:
            self.V_R += drop
            self.L_R += 1

    def snapshot(self) -> "MeasureTracker":
        return MeasureTracker(self.V, self.L, self.V_R, self.L_R)

    def as_tuple(self) -> tuple[float, int, float, int]:
        return (self.V, self.L, self.V_R, self.L_R)


# ---------------------------------------------------------------- adversaries


class Adversary:
    """Decides the next mean of the arm that was just played.

    ``next_mean`` sees the round index, the arm, its mean before the update and
    the environment (for history access). The environment clips the result.
    """

    stationary = False

    def next_mean(self, t: int, arm: int, mean: float, env: "Environment") -> float:
        raise NotImplementedError


class Stationary(Adversary):
    stationary = True

    def next_mean(self, t, arm, mean, env):
        return mean


@dataclass
class RottingGlobalRate(Adversary):
    """The played arm loses ``c / t`` after round ``t``.

    With ``per_arm=True`` the divisor is the arm's own play count instead.
    """

    c: float = 1.0
    per_arm: bool = False

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise DomainError("rotting rate must be positive")

    def next_mean(self, t, arm, mean, env):
        n = env.play_count(arm) if self.per_arm else t
        return mean - self.c / n


@dataclass
class RisingGlobalRate(Adversary):
    c: float = 1.0
    per_arm: bool = False

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise DomainError("rising rate must be positive")

    def next_mean(self, t, arm, mean, env):
        n = env.play_count(arm) if self.per_arm else t
        return mean + self.c / n


ALL_ARMS = "all"


class AbruptSchedule(Adversary):
    """Scheduled jumps applied the first time a selected arm is played on or
    after the scheduled round.

    Each event is ``(round, selector, new_mean)`` where ``selector`` is an arm
    id or ``"all"``. The jump happens after the reward of that play.
    """

    def __init__(self, events: Sequence[tuple[int, Union[int, str], float]]) -> None:
        cleaned = []
        for rnd, sel, value in events:
            if sel != ALL_ARMS and not (isinstance(sel, int) and sel >= 0):
                raise DomainError(f"arm selector must be a non-negative id or 'all', got {sel!r}")
            cleaned.append((int(rnd), sel, float(value)))
        # stable sort keeps file order among same-round events
        self.events = sorted(cleaned, key=lambda e: e[0])
        self._next: dict[int, int] = {}

    @classmethod
    def from_json(cls, path: str | Path) -> "AbruptSchedule":
        with open(path) as fh:
            raw = json.load(fh)
        return cls([(e["round"], e["arm"], e["mean"]) for e in raw])

    def next_mean(self, t, arm, mean, env):
        events = self.events
        i = self._next.get(arm, 0)
        while i < len(events) and events[i][0] <= t:
            _, sel, value = events[i]
            if sel == ALL_ARMS or sel == arm:
                mean = value
            i += 1
        self._next[arm] = i
        return mean


class Scripted(Adversary):
    """Wraps ``fn(history, t, arm, mean) -> delta``.

    ``history`` is the environment's trace (decisions and rewards through
    round ``t``); the agent's internal randomness is never exposed.
    """

    def __init__(self, fn: Callable[["Trace", int, int, float], float]) -> None:
        self.fn = fn

    def next_mean(self, t, arm, mean, env):
        return mean + self.fn(env.trace, t, arm, mean)


# ---------------------------------------------------------------------- trace


class Trace:
    """Per-round record plus the arm table and sparse mean-change log."""

    COLUMNS = ("round", "arm_id", "mean_at_play", "reward", "episode", "block", "cum_regret")

    def __init__(
        self,
        horizon: int,
        arms: list[int] | None = None,
        means: list[float] | None = None,
        rewards: list[float] | None = None,
        episodes: list[int] | None = None,
        blocks: list[int] | None = None,
        initial_means: list[float] | None = None,
        sampled_rounds: list[int] | None = None,
        changes: list[tuple[int, int, float]] | None = None,
        has_mean_history: bool = True,
    ) -> None:
        self.horizon = horizon
        self.arms = [] if arms is None else arms
        self.means = [] if means is None else means
        self.rewards = [] if rewards is None else rewards
        self.episodes = [] if episodes is None else episodes
        self.blocks = [] if blocks is None else blocks
        self.initial_means = [] if initial_means is None else initial_means
        self.sampled_rounds = [] if sampled_rounds is None else sampled_rounds
        self.changes = [] if changes is None else changes
        self.has_mean_history = has_mean_history

    def __len__(self) -> int:
        return len(self.arms)

    @property
    def num_arms(self) -> int:
        return len(self.initial_means)

    def outcome(self, i: int) -> RoundOutcome:
        m = self.means[i]
        return RoundOutcome(i + 1, self.arms[i], m, self.rewards[i], 1.0 - m)

    def regret_curve(self) -> np.ndarray:
        out = np.empty(len(self.means))
        total = 0.0
        for i, m in enumerate(self.means):
            total += 1.0 - m
            out[i] = total
        return out

    def cumulative_regret(self) -> float:
        if not self.means:
            raise UsageError("cumulative regret of an empty trace")
        total = 0.0
        for m in self.means:
            total += 1.0 - m
        return total

    def _require_history(self) -> None:
        if not self.has_mean_history:
            raise UsageError("trace carries no mean history (missing arm table / change log)")

    def mean_history(self, arms: Sequence[int] | None = None, rounds: int | None = None) -> np.ndarray:
        """Dense means: row ``r`` holds the means in force at round ``r + 1``.

        There are ``rounds + 1`` rows (default ``len(self) + 1``); the last row
        is the state after the final round. Arms not yet sampled carry their
        initial mean, which is what they would have had if sampled earlier.
        """
        self._require_history()
        n = len(self) if rounds is None else rounds
        cols = list(range(self.num_arms)) if arms is None else list(arms)
        pos = {a: j for j, a in enumerate(cols)}
        out = np.empty((n + 1, len(cols)))
        per_arm: dict[int, list[tuple[int, float]]] = {a: [] for a in cols}
        for t, a, v in self.changes:
            if a in pos and t <= n:
                per_arm[a].append((t, v))
        for a, j in pos.items():
            start, value = 0, self.initial_means[a]
            for t, v in per_arm[a]:
                out[start:t, j] = value
                start, value = t, v
            out[start:, j] = value
        return out

    def gap_history(self, arms: Sequence[int] | None = None) -> np.ndarray:
        """Gaps ``1 - mu_t(a)`` for rounds 1..len(self), shape (T, arms)."""
        return 1.0 - self.mean_history(arms)[:-1]

    # ---------------------------------------------------------------- export

    def to_csv(self, path: str | Path) -> None:
        """Write the per-round rows and a ``<path>.meta.json`` sidecar with the
        arm table and change log needed to rebuild the full mean history."""
        path = Path(path)
        total = 0.0
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.COLUMNS)
            for i in range(len(self)):
                m = self.means[i]
                total += 1.0 - m
                w.writerow(
                    (i + 1, self.arms[i], repr(m), repr(self.rewards[i]), self.episodes[i], self.blocks[i], repr(total))
                )
        if self.has_mean_history:
            meta = {
                "horizon": self.horizon,
                "initial_means": self.initial_means,
                "sampled_rounds": self.sampled_rounds,
                "changes": [list(c) for c in self.changes],
            }
            with open(meta_path(path), "w", encoding="utf-8") as fh:
                json.dump(meta, fh)

    @classmethod
    def from_csv(cls, path: str | Path) -> "Trace":
        path = Path(path)
        arms, means, rewards, episodes, blocks = [], [], [], [], []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                arms.append(int(row["arm_id"]))
                means.append(float(row["mean_at_play"]))
                rewards.append(float(row["reward"]))
                episodes.append(int(row["episode"]))
                blocks.append(int(row["block"]))
        mp = meta_path(path)
        if mp.exists():
            with open(mp, encoding="utf-8") as fh:
                meta = json.load(fh)
            return cls(
                meta["horizon"], arms, means, rewards, episodes, blocks,
                [float(x) for x in meta["initial_means"]],
                [int(x) for x in meta["sampled_rounds"]],
                [(int(t), int(a), float(v)) for t, a, v in meta["changes"]],
            )
        return cls(len(arms), arms, means, rewards, episodes, blocks, has_mean_history=False)


def meta_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


# ---------------------------------------------------------------- environment


class Environment:
    """Lazily grown arm pool driven one round at a time by an agent."""

    def __init__(
        self,
        reservoir: BetaRegularReservoir,
        horizon: int,
        adversary: Adversary | None = None,
        arm_stream: UniformStream | None = None,
        reward_stream: UniformStream | None = None,
        reward_model: RewardModel = RewardModel.BERNOULLI,
    ) -> None:
        if horizon < 1:
            raise UsageError("horizon must be at least 1")
        self.reservoir = reservoir
        self.horizon = horizon
        self.adversary = adversary if adversary is not None else Stationary()
        self.reward_model = reward_model
        self._arm_stream = arm_stream if arm_stream is not None else UniformStream(0)
        self._reward_stream = reward_stream if reward_stream is not None else UniformStream(1)
        self.round = 0
        self.cum_regret = 0.0
        self.tracker = MeasureTracker()
        self._means: list[float] = []
        self._counts: list[int] = []
        self.trace = Trace(horizon)

    @classmethod
    def seeded(cls, reservoir, horizon, adversary=None, master_seed=0, rep=0) -> "Environment":
        from banditlab import rng

        return cls(
            reservoir, horizon, adversary,
            UniformStream.for_run(master_seed, rep, rng.RESERVOIR),
            UniformStream.for_run(master_seed, rep, rng.REWARD),
        )

    @property
    def num_arms(self) -> int:
        return len(self._means)

    @property
    def remaining(self) -> int:
        return self.horizon - self.round

    def current_mean(self, arm: int) -> float:
        return self._means[arm]

    def initial_mean(self, arm: int) -> float:
        return self.trace.initial_means[arm]

    def play_count(self, arm: int) -> int:
        return self._counts[arm]

    def sample_new_arm(self) -> int:
        mean = self.reservoir.sample(self._arm_stream)
        arm = len(self._means)
        self._means.append(mean)
        self._counts.append(0)
        self.trace.initial_means.append(mean)
        self.trace.sampled_rounds.append(self.round + 1)
        return arm

    def add_arm(self, mean: float) -> int:
        """Insert an arm with a chosen initial mean (tests and finite instances)."""
        if not 0.0 <= mean <= 1.0:
            raise DomainError(f"mean must lie in [0, 1], got {mean!r}")
        arm = len(self._means)
        self._means.append(float(mean))
        self._counts.append(0)
        self.trace.initial_means.append(float(mean))
        self.trace.sampled_rounds.append(self.round + 1)
        return arm

    def play(self, arm: int, episode: int = 0, block: int = 0) -> RoundOutcome:
        t = self.round + 1
        if t > self.horizon:
            raise UsageError(f"cannot play round {t} past horizon {self.horizon}")
        if not 0 <= arm < len(self._means):
            raise UsageError(f"unknown arm id {arm!r}")
        mean = self._means[arm]
        reward = 1.0 if self._reward_stream.next() < mean else 0.0
        regret = 1.0 - mean
        self.cum_regret += regret
        self._counts[arm] += 1
        tr = self.trace
        tr.arms.append(arm)
        tr.means.append(mean)
        tr.rewards.append(reward)
        tr.episodes.append(episode)
        tr.blocks.append(block)
        adv = self.adversary
        if not adv.stationary:
            new = adv.next_mean(t, arm, mean, self)
            if new < 0.0:
                new = 0.0
            elif new > 1.0:
                new = 1.0
            elif math.isnan(new):
                raise DomainError("adversary produced NaN mean")
            if new != mean:
                self._means[arm] = new
                tr.changes.append((t, arm, new))
                self.tracker.record(mean - new)
        self.round = t
        return RoundOutcome(t, arm, mean, reward, regret)

    def realized_measures(self) -> MeasureTracker:
        return self.tracker.snapshot()


def realized_measures(env: Environment) -> MeasureTracker:
    return env.realized_measures()


def cumulative_regret(trace: Trace) -> float:
    return trace.cumulative_regret()
