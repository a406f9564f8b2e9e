"""Offline analysis of complete traces.

Everything here needs the ground-truth mean history that the environment logs,
so it is an evaluation tool and never consulted by agents.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from banditlab.environment import Trace
from banditlab.errors import UsageError

WINDOWED = "windowed"
GLOBAL = "global"
BUDGET_RULES = (WINDOWED, GLOBAL)


@dataclass(frozen=True)
class SafetyParams:
    """An arm is safe on ``[s1, s2]`` if its gap sum there is at most
    ``kappa_inv * (s2 - s1 + 1) ** (beta / (beta + 1))``."""

    beta: float
    kappa_inv: float = 1.0

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not self.kappa_inv > 0:
            raise ValueError("kappa_inv must be positive")

    @property
    def exponent(self) -> float:
        return self.beta / (self.beta + 1.0)

    def budget(self, n: int) -> int:
        """Arms inspected for a window of ``n`` rounds (ceiling, so at least one)."""
        return math.ceil(n**self.exponent)

    def thresholds(self, n: int) -> np.ndarray:
        """``thresholds(n)[k]`` is the allowance for an interval of length ``k + 1``."""
        return self.kappa_inv * np.arange(1, n + 1, dtype=float) ** self.exponent


@dataclass
class SafetyResult:
    safe: bool
    interval: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.safe


def _max_violating_length(window_sum: float, kappa_inv: float, exponent: float) -> int:
    # lengths with kappa_inv * len**exponent >= window_sum can never be exceeded;
    # the slack keeps the cut conservative under rounding
    return int(math.floor((window_sum / kappa_inv) ** (1.0 / exponent) * (1.0 + 1e-9))) + 1


def is_arm_safe(gaps: Sequence[float], params: SafetyParams) -> SafetyResult:
    """Check every subinterval of a gap sequence.

    Scans right ends in increasing order and, for each, left ends in
    increasing order; the first violation found is returned as a 1-based
    ``(s1, s2)`` pair relative to the sequence.
    """
    g = np.asarray(gaps, dtype=float)
    n = len(g)
    if n < 1:
        raise ValueError("gap sequence must be non-empty")
    values = g.tolist()
    prefix = np.concatenate(([0.0], np.cumsum(g)))
    thr = params.thresholds(n)
    kappa, exponent = params.kappa_inv, params.exponent
    # prefix differences only shortlist intervals; ties at the threshold are
    # settled with a correctly rounded sum
    tol = 1e-9 * (1.0 + float(prefix[-1]))
    for s2 in range(1, n + 1):
        lmax = min(s2, _max_violating_length(prefix[s2] + tol, kappa, exponent))
        a = s2 - lmax + 1
        sums = prefix[s2] - prefix[a - 1 : s2]
        for j in np.flatnonzero(sums > thr[s2 - a :: -1] - tol):
            s1 = a + int(j)
            if math.fsum(values[s1 - 1 : s2]) > kappa * float(s2 - s1 + 1) ** exponent:
                return SafetyResult(False, (s1, s2))
    return SafetyResult(True)


# --------------------------------------------------------- significant shifts


@dataclass
class Phase:
    start: int
    end: int
    shift: bool
    failing: list[dict] = field(default_factory=list)
    safe_arm: int | None = None

    def to_dict(self) -> dict:
        d = {"start": self.start, "end": self.end, "shift": self.shift}
        if self.shift:
            d["failing"] = self.failing
        else:
            d["safe_arm"] = self.safe_arm
        return d


@dataclass
class ShiftReport:
    taus: list[int]
    phases: list[Phase]
    horizon: int

    @property
    def num_shifts(self) -> int:
        return len(self.taus)

    @property
    def phase_lengths(self) -> list[int]:
        return [p.end - p.start + 1 for p in self.phases]

    def to_dict(self) -> dict:
        return {
            "taus": self.taus,
            "phase_lengths": self.phase_lengths,
            "witnesses": [p.to_dict() for p in self.phases],
        }

    def to_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _phase_pool(trace: Trace, params: SafetyParams, tau: int, horizon: int, rule: str) -> list[int]:
    sampled = trace.sampled_rounds
    if rule == WINDOWED:
        cap = params.budget(horizon - tau + 1)
        pool = [a for a, r in enumerate(sampled) if r >= tau and r <= horizon]
    else:
        cap = params.budget(horizon)
        pool = [a for a, r in enumerate(sampled) if r <= horizon]
    return pool[:cap]


def _candidates(pool, sampled, params, tau, t, rule) -> int:
    """Number of leading pool arms that are candidates at round ``t``."""
    n = params.budget(t - tau + 1) if rule == WINDOWED else params.budget(t)
    k = 0
    for a in pool[:n]:
        if sampled[a] > t:
            break
        k += 1
    return k


def detect_significant_shifts(trace: Trace, params: SafetyParams, budget_rule: str = WINDOWED) -> ShiftReport:
    """Recursive significant-shift times over a complete trace.

    Starting from ``tau = 1``, the next shift is the first ``t > tau`` at which
    every candidate arm (the first budgeted arms sampled by round ``t``) has a
    violating interval inside ``[tau, t]``. An empty candidate set never
    triggers a shift.
    """
    if budget_rule not in BUDGET_RULES:
        raise UsageError(f"budget rule must be one of {BUDGET_RULES}, got {budget_rule!r}")
    if not trace.has_mean_history:
        raise UsageError("shift detection needs the trace's mean history")
    horizon = len(trace)
    sampled = trace.sampled_rounds
    exponent, kappa = params.exponent, params.kappa_inv
    taus: list[int] = []
    phases: list[Phase] = []
    tau = 1
    while True:
        pool = _phase_pool(trace, params, tau, horizon, budget_rule)
        n = horizon - tau + 1
        shift_at = None
        flagged = np.full(len(pool), np.iinfo(np.int64).max)
        witness: dict[int, tuple[int, int]] = {}
        if pool and n >= 2:
            gaps = trace.gap_history(pool)[tau - 1 :]
            prefix = np.vstack((np.zeros(len(pool)), np.cumsum(gaps, axis=0)))
            thr = params.thresholds(n)
            live = np.arange(len(pool))
            for k in range(1, n + 1):  # k-th round of the phase, absolute round tau + k - 1
                t = tau + k - 1
                if live.size:
                    col = prefix[k, live]
                    lmax = min(k, _max_violating_length(float(col.max()), kappa, exponent))
                    a = k - lmax + 1
                    sums = col[None, :] - prefix[a - 1 : k][:, live]
                    bad = sums > thr[k - a :: -1][:, None]
                    hit = bad.any(axis=0)
                    if hit.any():
                        for j in np.flatnonzero(hit):
                            arm_pos = int(live[j])
                            s1 = a + int(np.argmax(bad[:, j]))
                            flagged[arm_pos] = t
                            witness[arm_pos] = (tau + s1 - 1, t)
                        live = live[~hit]
                if t > tau:
                    c = _candidates(pool, sampled, params, tau, t, budget_rule)
                    if c and flagged[:c].max() <= t:
                        shift_at = t
                        failing = [
                            {"arm": pool[j], "interval": list(witness[j])} for j in range(c)
                        ]
                        break
        if shift_at is None:
            safe_arm = None
            if pool:
                c = _candidates(pool, sampled, params, tau, horizon, budget_rule)
                for j in range(c):
                    if flagged[j] > horizon:
                        safe_arm = pool[j]
                        break
            phases.append(Phase(tau, horizon, False, safe_arm=safe_arm))
            break
        phases.append(Phase(tau, shift_at - 1, True, failing=failing))
        taus.append(shift_at)
        tau = shift_at
    return ShiftReport(taus, phases, horizon)


# ---------------------------------------------------------------- concentration


@dataclass
class ConcentrationReport:
    max_violation: float
    interval: tuple[int, int]
    band_constant: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= 0.0


def concentration_check(trace: Trace) -> ConcentrationReport:
    """Largest excess of ``|sum(1 - Y) - sum(delta)|`` over the band
    ``sum(delta) / 2 + 6.5 * log2(2 T**3)``, across all intervals."""
    T = len(trace)
    if T == 0:
        raise UsageError("empty trace")
    delta = 1.0 - np.asarray(trace.means, dtype=float)
    emp = 1.0 - np.asarray(trace.rewards, dtype=float)
    pd = np.concatenate(([0.0], np.cumsum(delta)))
    pe = np.concatenate(([0.0], np.cumsum(emp)))
    const = 6.5 * math.log2(2.0 * T**3)
    best, where = -math.inf, (1, 1)
    for s1 in range(1, T + 1):
        sd = pd[s1:] - pd[s1 - 1]
        se = pe[s1:] - pe[s1 - 1]
        excess = np.abs(se - sd) - (0.5 * sd + const)
        j = int(np.argmax(excess))
        if excess[j] > best:
            best, where = float(excess[j]), (s1, s1 + j)
    return ConcentrationReport(best, where, const)


def regret_curve(trace: Trace) -> np.ndarray:
    return trace.regret_curve()
