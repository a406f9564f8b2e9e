"""Agents driving an :class:`~banditlab.environment.Environment` round by round.

Both non-stationary agents run doubling blocks inside restart-delimited
episodes: block ``m`` lasts ``2**m`` rounds (or until the horizon) and works on
a fresh subsample of arms. They differ in how they play inside a block and in
what triggers a restart.
"""
from __future__ import annotations

import enum
import math
from typing import Callable

from banditlab.base_policies import UCB, UCB_EXPLORATION, BasePolicy
from banditlab.environment import Environment, RoundOutcome
from banditlab.rng import UniformStream

# calibrated on desk-scale runs (see README); any large enough values work
DEFAULT_C1 = 2.0
DEFAULT_C2 = 0.1


class SubsampleRule(enum.Enum):
    BLACKBOX_HIGH_BETA = "blackbox-high-beta"
    BLACKBOX_LOW_BETA = "blackbox-low-beta"
    ELIMINATION = "elimination"


def subsample_count(m: int, beta: float, horizon: int, rule: SubsampleRule, include_log: bool = False) -> int:
    """Arms drawn for block ``m``; always capped at the block length ``2**m``."""
    if m < 1:
        raise ValueError("block index starts at 1")
    cap = 2**m
    if rule is SubsampleRule.BLACKBOX_HIGH_BETA:
        n = math.ceil(2.0 ** (m * beta / (beta + 1.0)))
    elif rule is SubsampleRule.BLACKBOX_LOW_BETA:
        n = math.ceil(2.0 ** (m * beta / 2.0))
    else:
        f = math.log2(horizon) if include_log else 1.0
        n = math.ceil(2.0 ** ((m + 1) * beta / (beta + 1.0)) * f)
    return max(1, min(n, cap))


def blackbox_rule(beta: float) -> SubsampleRule:
    return SubsampleRule.BLACKBOX_HIGH_BETA if beta >= 1.0 else SubsampleRule.BLACKBOX_LOW_BETA


def changepoint_threshold(
    m: int, subsample_size: int, horizon: int, c1: float = 1.0, log_exp: int = 1, max_term: bool = True
) -> float:
    """``c1 * max(|A_m|, 2**(m/2)) * log2(T)**log_exp``.

    ``max_term=False`` drops the ``2**(m/2)`` operand (the simpler threshold
    ``c1 * |A_m| * log2(T)**log_exp``).
    """
    size = max(subsample_size, 2.0 ** (m / 2.0)) if max_term else subsample_size
    return c1 * size * math.log2(horizon) ** log_exp


def iw_estimate(g_size: int, played: bool, reward: float) -> float:
    """Importance-weighted gap estimate under uniform play over ``g_size`` arms."""
    return (1 - reward) * g_size if played else 0


class Agent:
    """Shared episode/block bookkeeping.

    ``episode_starts`` lists the first round of every episode and
    ``block_starts`` holds ``(round, episode, m)`` for every block opened.
    """

    name = "agent"

    def __init__(self, beta: float, horizon: int, truncate_subsample: bool = False) -> None:
        if not beta > 0:
            raise ValueError("beta must be positive")
        if horizon < 2:
            raise ValueError("horizon must be at least 2")
        self.beta = beta
        self.horizon = horizon
        self.truncate_subsample = truncate_subsample
        self.episode = 0
        self.m = 0
        self.block_start = 0
        self.subsample: list[int] = []
        self.episode_starts: list[int] = []
        self.block_starts: list[tuple[int, int, int]] = []
        self.restarts = 0
        self._need_block = True

    def _draw_subsample(self, env: Environment, n: int) -> list[int]:
        if self.truncate_subsample:
            n = max(1, min(n, env.remaining))
        return [env.sample_new_arm() for _ in range(n)]

    def _open_block(self, env: Environment) -> None:
        if self.m == 0:
            self.episode += 1
            self.m = 1
            self.episode_starts.append(env.round + 1)
        self.block_start = env.round + 1
        self.block_starts.append((self.block_start, self.episode, self.m))
        self._start_block(env)
        self._need_block = False

    def _start_block(self, env: Environment) -> None:
        raise NotImplementedError

    def _restart(self) -> None:
        self.restarts += 1
        self.m = 0
        self._need_block = True

    def _maybe_advance_block(self, t: int) -> None:
        if t - self.block_start + 1 == 2**self.m:
            self.m += 1
            self._need_block = True

    def step(self, env: Environment) -> RoundOutcome:
        raise NotImplementedError

    def run(self, env: Environment) -> Environment:
        while env.round < env.horizon:
            self.step(env)
        return env


class BlackboxAgent(Agent):
    """Restarting blackbox around a finite-armed base policy.

    Each block runs a fresh ``base(2**m, |A_m|)``. A restart fires as soon as
    the block's empirical regret ``sum(1 - Y)`` reaches
    :func:`changepoint_threshold`.
    """

    name = "blackbox"

    def __init__(
        self,
        beta: float,
        horizon: int,
        base: Callable[[int, int], BasePolicy] = UCB,
        c1: float = DEFAULT_C1,
        log_exp: int = 1,
        max_term: bool = True,
        rule: SubsampleRule | None = None,
        truncate_subsample: bool = False,
    ) -> None:
        super().__init__(beta, horizon, truncate_subsample)
        self.base_factory = base
        self.c1 = c1
        self.log_exp = log_exp
        self.max_term = max_term
        self.rule = rule if rule is not None else blackbox_rule(beta)
        self.base: BasePolicy | None = None
        self.empirical_block_regret = 0.0
        self.threshold = math.inf

    def _start_block(self, env):
        n = subsample_count(self.m, self.beta, self.horizon, self.rule)
        self.subsample = self._draw_subsample(env, n)
        self.base = self.base_factory(max(2, 2**self.m), len(self.subsample))
        self.empirical_block_regret = 0.0
        self.threshold = changepoint_threshold(
            self.m, len(self.subsample), self.horizon, self.c1, self.log_exp, self.max_term
        )

    def step(self, env):
        if self._need_block:
            self._open_block(env)
        base = self.base
        local = base.select()
        out = env.play(self.subsample[local], self.episode, self.m)
        base.update(local, out.reward)
        self.empirical_block_regret += 1.0 - out.reward
        if self.empirical_block_regret >= self.threshold:
            self._restart()
        else:
            self._maybe_advance_block(out.round)
        return out


class EliminationAgent(Agent):
    """Restarting subsampling elimination.

    Plays uniformly over the candidate set ``G``; an arm leaves ``G`` once its
    importance-weighted gap sum reaches ``c2 * |A_m| * log2(T)``. An empty
    ``G`` triggers a restart. Every new block re-subsamples and resets ``G``.
    """

    name = "elimination"

    def __init__(
        self,
        beta: float,
        horizon: int,
        stream: UniformStream | None = None,
        c2: float = DEFAULT_C2,
        include_log: bool = False,
        truncate_subsample: bool = False,
    ) -> None:
        super().__init__(beta, horizon, truncate_subsample)
        self.stream = stream if stream is not None else UniformStream(2)
        self.c2 = c2
        self.include_log = include_log
        self.candidates: list[int] = []
        self.iw_sums: dict[int, float] = {}
        self.threshold = math.inf

    def _start_block(self, env):
        n = subsample_count(self.m, self.beta, self.horizon, SubsampleRule.ELIMINATION, self.include_log)
        self.subsample = self._draw_subsample(env, n)
        self.candidates = list(self.subsample)
        self.iw_sums = dict.fromkeys(self.subsample, 0.0)
        self.threshold = self.c2 * len(self.subsample) * math.log2(self.horizon)

    def step(self, env):
        if self._need_block:
            self._open_block(env)
        g = self.candidates
        size = len(g)
        i = int(self.stream.next() * size)
        arm = g[i]
        out = env.play(arm, self.episode, self.m)
        # arms not played this round add an estimate of exactly zero
        total = self.iw_sums[arm] + (1.0 - out.reward) * size
        self.iw_sums[arm] = total
        if total >= self.threshold:
            g[i] = g[-1]
            g.pop()
        if not g:
            self._restart()
        else:
            self._maybe_advance_block(out.round)
        return out


class SSUCBAgent(Agent):
    """Subsample ``ceil(T**(beta/(beta+1)))`` arms once, then UCB for the whole horizon."""

    name = "ssucb"

    def __init__(self, beta: float, horizon: int, exploration: float = UCB_EXPLORATION) -> None:
        super().__init__(beta, horizon)
        self.exploration = exploration
        self.k = ssucb_size(beta, horizon)
        self.base: UCB | None = None

    def _start_block(self, env):
        self.subsample = [env.sample_new_arm() for _ in range(self.k)]
        self.base = UCB(self.horizon, self.k, self.exploration)

    def step(self, env):
        if self._need_block:
            self._open_block(env)
        local = self.base.select()
        out = env.play(self.subsample[local], self.episode, self.m)
        self.base.update(local, out.reward)
        return out


def ssucb_size(beta: float, horizon: int) -> int:
    return max(1, math.ceil(horizon ** (beta / (beta + 1.0))))


def ssucb_run(beta: float, horizon: int, env: Environment, exploration: float = UCB_EXPLORATION):
    SSUCBAgent(beta, horizon, exploration).run(env)
    return env.trace
