"""Immutable time-series container shared by all model tiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class Trajectory:
    """Recorded states at strictly increasing times.

    states has one leading time axis; entries may be flat real vectors
    (rate-equation models) or complex matrices (density operators).
    metadata carries the parameter snapshot of the run that produced it.
    """

    times: np.ndarray
    states: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states)
        if times.ndim != 1 or len(times) != len(states):
            raise ValueError("times and states lengths must match")
        if len(times) > 1 and not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        times.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def column(self, index: int) -> np.ndarray:
        """One state component over time (flat-vector trajectories only)."""
        return self.states[:, index]
