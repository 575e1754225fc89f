"""Large-scale propagation: link state, pathloss and shadowing."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class LinkState(str, enum.Enum):
    LOS = "LOS"
    NLOS = "NLOS"
    OUTAGE = "Outage"


@dataclass(frozen=True)
class LinkStateModel:
    """Distance-dependent state probabilities.

    ``P_LoS(d) = exp(-los_decay * d)``. The outage probability follows
    ``max(0, 1 - exp(-outage_decay * d + outage_offset))`` and NLoS takes the
    remaining mass of the non-LoS part, so the three always sum to one.
    Setting ``outage_decay = 0`` and ``outage_offset = 0`` disables outage.
    """

    los_decay: float = 1 / 67.1
    outage_decay: float = 1 / 30.0
    outage_offset: float = 5.2

    def __post_init__(self):
        if self.los_decay < 0 or self.outage_decay < 0:
            raise ValueError("decay rates must be >= 0")

    def p_outage(self, d: float) -> float:
        if self.outage_decay == 0 and self.outage_offset == 0:
            return 0.0
        return max(0.0, 1.0 - math.exp(-self.outage_decay * d + self.outage_offset))

    def p_los(self, d: float) -> float:
        return math.exp(-self.los_decay * d)

    def p_nlos(self, d: float) -> float:
        return (1.0 - self.p_los(d)) * (1.0 - self.p_outage(d))


@dataclass(frozen=True)
class FixedLinkState:
    """Probabilities that do not depend on distance (tests, pinned studies)."""

    los: float
    nlos: float

    def __post_init__(self):
        if not (0 <= self.los <= 1 and 0 <= self.nlos <= 1 and self.los + self.nlos <= 1 + 1e-12):
            raise ValueError(f"invalid state probabilities los={self.los} nlos={self.nlos}")

    def p_los(self, d: float) -> float:
        return self.los

    def p_nlos(self, d: float) -> float:
        return self.nlos


@dataclass(frozen=True)
class PathlossParams:
    alpha: float
    beta: float
    sigma: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


# 28 GHz-class values; representative defaults, overridable from the scenario
LOS_PATHLOSS = PathlossParams(alpha=61.4, beta=2.0, sigma=5.8)
NLOS_PATHLOSS = PathlossParams(alpha=72.0, beta=2.92, sigma=8.7)


def select_link_state(distance: float, model, uniform_draw: float) -> LinkState:
    """Pick LOS / NLOS / Outage by comparing a uniform draw to the cumulative probabilities."""
    if not math.isfinite(distance):
        raise ValueError(f"distance must be finite, got {distance}")
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if not 0.0 <= uniform_draw <= 1.0:
        raise ValueError(f"uniform draw outside [0, 1]: {uniform_draw}")
    p_los = model.p_los(distance)
    p_nlos = model.p_nlos(distance)
    if uniform_draw <= p_los:
        return LinkState.LOS
    if uniform_draw <= p_los + p_nlos:
        return LinkState.NLOS
    return LinkState.OUTAGE


def pathloss_db(distance: float, params: PathlossParams, shadowing_db: float = 0.0) -> float:
    """``alpha + beta * 10 log10(d) + xi`` in dB."""
    if not distance > 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    return params.alpha + params.beta * 10.0 * math.log10(distance) + shadowing_db


def draw_shadowing(params: PathlossParams, rng) -> float:
    return float(rng.normal(0.0, params.sigma)) if params.sigma > 0 else 0.0


def link_budget_dbm(tx_power_dbm: float, beamforming_gain: float, pathloss: float) -> float:
    """Received power in dBm; ``pathloss`` in dB may be ``inf`` (outage)."""
    if beamforming_gain <= 0 or math.isinf(pathloss):
        return -math.inf
    return tx_power_dbm + 10.0 * math.log10(beamforming_gain) - pathloss
