"""Reservoir distributions for initial arm means, and the reward model."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from banditlab.errors import DomainError
from banditlab.rng import UniformStream


class Construction(enum.Enum):
    INVERSE_CDF_CANONICAL = "inverse-cdf-canonical"


@dataclass(frozen=True)
class BetaRegularReservoir:
    """Initial means with upper tail ``P(mu0 > 1 - x) = x**beta``.

    Realised by the inverse CDF ``mu0 = 1 - U**(1/beta)``, which makes both
    tail constants equal to one.
    """

    beta: float
    construction: Construction = Construction.INVERSE_CDF_CANONICAL

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta!r}")

    def sample(self, stream: UniformStream) -> float:
        return 1.0 - stream.next() ** (1.0 / self.beta)

    def sample_many(self, n: int, gen: np.random.Generator) -> np.ndarray:
        return 1.0 - gen.random(n) ** (1.0 / self.beta)

    def tail_probability(self, x: float) -> float:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0, 1], got {x!r}")
        return x**self.beta


def sample_initial_mean(reservoir: BetaRegularReservoir, stream: UniformStream) -> float:
    return reservoir.sample(stream)


def tail_probability(reservoir: BetaRegularReservoir, x: float) -> float:
    return reservoir.tail_probability(x)


class RewardModel(enum.Enum):
    BERNOULLI = "bernoulli"

    def draw(self, mean: float, stream: UniformStream) -> float:
        return draw_reward(mean, self, stream)


def draw_reward(mean: float, model: RewardModel, stream: UniformStream) -> float:
    """Draw a reward in [0, 1] whose expectation is ``mean``; one uniform consumed."""
    if not 0.0 <= mean <= 1.0:
        raise DomainError(f"mean must lie in [0, 1], got {mean!r}")
    return 1.0 if stream.next() < mean else 0.0
