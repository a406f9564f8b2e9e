"""Simulation library for non-stationary infinite-armed bandits."""

from banditlab.errors import ConfigError, DomainError, UsageError
from banditlab.reservoir import BetaRegularReservoir, RewardModel
from banditlab.environment import (
    AbruptSchedule,
    Environment,
    MeasureTracker,
    RisingGlobalRate,
    RottingGlobalRate,
    RoundOutcome,
    Scripted,
    Stationary,
    Trace,
)
from banditlab.base_policies import UCB, SuccessiveElimination
from banditlab.agents import BlackboxAgent, EliminationAgent, SSUCBAgent
from banditlab.analysis import SafetyParams, ShiftReport, detect_significant_shifts, is_arm_safe

__all__ = [
    "AbruptSchedule",
    "BetaRegularReservoir",
    "BlackboxAgent",
    "ConfigError",
    "DomainError",
    "EliminationAgent",
    "Environment",
    "MeasureTracker",
    "RewardModel",
    "RisingGlobalRate",
    "RottingGlobalRate",
    "RoundOutcome",
    "SSUCBAgent",
    "SafetyParams",
    "Scripted",
    "ShiftReport",
    "Stationary",
    "SuccessiveElimination",
    "Trace",
    "UCB",
    "UsageError",
    "detect_significant_shifts",
    "is_arm_safe",
]
