from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class MobilityState:
    """Constant-velocity 2-D motion from ``position`` at t = 0."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(2))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float).reshape(2))

    @property
    def speed(self) -> float:
        return float(np.hypot(*self.velocity))


def advance_mobility(state: MobilityState, t: float) -> np.ndarray:
    if t < 0:
        raise ValueError("time must be >= 0")
    return state.position + state.velocity * t


def distance(a, b) -> float:
    return float(math.hypot(a[0] - b[0], a[1] - b[1]))


def time_to_reach(state: MobilityState, anchor, radius: float) -> float | None:
    """Earliest t >= 0 with ``|position(t) - anchor| = radius``, or None."""
    p = state.position - np.asarray(anchor, dtype=float)
    v = state.velocity
    a = float(v @ v)
    b = 2 * float(p @ v)
    c = float(p @ p) - radius**2
    if c > 0:
        return None
    if c == 0:
        return 0.0
    if a == 0:
        return None
    disc = b * b - 4 * a * c
    return (-b + math.sqrt(disc)) / (2 * a)
