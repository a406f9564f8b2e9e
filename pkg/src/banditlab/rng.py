"""Seeded random streams.

Every run derives its streams from ``(master_seed, rep, purpose)`` through
``numpy.random.SeedSequence`` so that, e.g., sampling an extra arm never shifts
the reward draws of arms already in play.
"""
from __future__ import annotations

import numpy as np

RESERVOIR = 0
REWARD = 1
AGENT = 2
ADVERSARY = 3

_BLOCK = 2048


def seed_sequence(master_seed: int, rep: int, purpose: int | None = None) -> np.random.SeedSequence:
    key = (rep,) if purpose is None else (rep, purpose)
    return np.random.SeedSequence(entropy=master_seed, spawn_key=key)


class UniformStream:
    """One uniform on [0, 1) per ``next()`` call, buffered in blocks.

    Chunking does not change the values: the sequence equals
    ``Generator(PCG64(seq)).random(n)``.
    """

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, seed: int | np.random.SeedSequence) -> None:
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._buf: list[float] = []
        self._pos = 0

    @classmethod
    def for_run(cls, master_seed: int, rep: int, purpose: int) -> "UniformStream":
        return cls(seed_sequence(master_seed, rep, purpose))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def next(self) -> float:
        pos = self._pos
        if pos == len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]
