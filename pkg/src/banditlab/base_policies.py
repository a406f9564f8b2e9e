"""Finite-armed stochastic base algorithms for the blackbox restart scheme.

A base policy is built as ``Policy(horizon, num_arms)`` and then driven by
``select()`` / ``update(local_index, reward)``. It only ever sees local indices
``0..num_arms-1``; mapping to environment arm ids is the caller's job.

All logarithms are base 2.
"""
from __future__ import annotations

import heapq
import math
from typing import Protocol

UCB_EXPLORATION = 2.0


class BasePolicy(Protocol):
    num_arms: int

    def select(self, t: int | None = None) -> int: ...

    def update(self, arm: int, reward: float) -> None: ...


def ucb_index(count: int, reward_sum: float, horizon: int, exploration: float = UCB_EXPLORATION) -> float:
    """Empirical mean plus ``sqrt(exploration * log2(horizon) / count)``; +inf if unplayed."""
    if count == 0:
        return math.inf
    return reward_sum / count + math.sqrt(exploration * math.log2(horizon) / count)


class UCB:
    """UCB1 variant with a fixed ``log2(T)`` bonus.

    Because the bonus only depends on the arm's own count, an update changes a
    single index, so the argmax is kept in a heap keyed by ``(-index, arm)``.
    Ties go to the lowest arm index.
    """

    def __init__(self, horizon: int, num_arms: int, exploration: float = UCB_EXPLORATION) -> None:
        if horizon < 2:
            raise ValueError("UCB needs horizon >= 2")
        if num_arms < 1:
            raise ValueError("UCB needs at least one arm")
        self.horizon = horizon
        self.num_arms = num_arms
        self.exploration = exploration
        self._bonus = exploration * math.log2(horizon)
        self.counts = [0] * num_arms
        self.reward_sums = [0.0] * num_arms
        self._version = [0] * num_arms
        self._heap = [(-math.inf, a, 0) for a in range(num_arms)]

    def index(self, arm: int) -> float:
        return ucb_index(self.counts[arm], self.reward_sums[arm], self.horizon, self.exploration)

    def select(self, t: int | None = None) -> int:
        heap = self._heap
        while heap[0][2] != self._version[heap[0][1]]:
            heapq.heappop(heap)
        return heap[0][1]

    def update(self, arm: int, reward: float) -> None:
        n = self.counts[arm] + 1
        s = self.reward_sums[arm] + reward
        self.counts[arm] = n
        self.reward_sums[arm] = s
        v = self._version[arm] + 1
        self._version[arm] = v
        entry = (-(s / n + math.sqrt(self._bonus / n)), arm, v)
        heap = self._heap
        if heap[0][1] == arm:
            heapq.heapreplace(heap, entry)
        else:
            heapq.heappush(heap, entry)


class SuccessiveElimination:
    """Round-robin over surviving arms; after each full pass drop every arm
    whose empirical mean trails the leader by more than
    ``2 * sqrt(2 * log2(T) / N)``."""

    def __init__(self, horizon: int, num_arms: int, exploration: float = UCB_EXPLORATION) -> None:
        if horizon < 2:
            raise ValueError("successive elimination needs horizon >= 2")
        if num_arms < 1:
            raise ValueError("successive elimination needs at least one arm")
        self.horizon = horizon
        self.num_arms = num_arms
        self._c = exploration * math.log2(horizon)
        self.active = list(range(num_arms))
        self.counts = [0] * num_arms
        self.reward_sums = [0.0] * num_arms
        self._pos = 0

    def select(self, t: int | None = None) -> int:
        return self.active[self._pos]

    def update(self, arm: int, reward: float) -> None:
        self.counts[arm] += 1
        self.reward_sums[arm] += reward
        self._pos += 1
        if self._pos < len(self.active):
            return
        self._pos = 0
        if len(self.active) == 1:
            return
        n = self.counts[self.active[0]]
        means = {a: self.reward_sums[a] / n for a in self.active}
        best = max(means.values())
        radius = 2.0 * math.sqrt(self._c / n)
        self.active = [a for a in self.active if best - means[a] <= radius]


BASE_POLICIES = {"ucb": UCB, "se": SuccessiveElimination}


def simulate_finite(policy: BasePolicy, mean_at, horizon: int, stream) -> list[int]:
    """Drive a base policy on a finite Bernoulli instance for ``horizon`` rounds.

    ``mean_at(t, arm)`` gives the (possibly corrupted) mean in force at round
    ``t``. Returns the sequence of local arms played.
    """
    played = []
    for t in range(1, horizon + 1):
        a = policy.select(t)
        reward = 1.0 if stream.next() < mean_at(t, a) else 0.0
        policy.update(a, reward)
        played.append(a)
    return played
