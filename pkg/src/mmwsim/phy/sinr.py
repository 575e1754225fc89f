"""Received power and interference-aware SINR."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

BOLTZMANN = 1.380649e-23
REFERENCE_TEMPERATURE = 290.0


def dbm_to_watt(dbm: float) -> float:
    return 10 ** ((dbm - 30) / 10)


def db_to_linear(db):
    return 10 ** (np.asarray(db, dtype=float) / 10)


def linear_to_db(x):
    with np.errstate(divide="ignore"):
        return 10 * np.log10(x)


def thermal_noise_psd(temperature: float = REFERENCE_TEMPERATURE) -> float:
    """``k T`` in W/Hz."""
    return BOLTZMANN * temperature


def rx_power_dbm(tx_power_dbm: float, beamforming_gain: float, pathloss_db: float, shadowing_db: float = 0.0) -> float:
    """Link budget ``P_TX + G_BF - PL - SW`` with ``G_BF`` given in linear units."""
    if beamforming_gain <= 0 or math.isinf(pathloss_db) or math.isinf(shadowing_db):
        return -math.inf
    return tx_power_dbm + 10 * math.log10(beamforming_gain) - pathloss_db - shadowing_db


@dataclass(frozen=True)
class LinkTerms:
    """Power terms of one transmitter as seen by the receiver of interest.

    ``tx_power`` is in watts over the bandwidth passed to
    :func:`compute_sinr`; ``pathloss_db`` already includes shadowing and may
    be ``inf``; ``gain`` is the beamforming gain, scalar or one value per
    sub-band.
    """

    tx_power: float
    pathloss_db: float
    gain: np.ndarray | float

    def received(self) -> np.ndarray:
        if math.isinf(self.pathloss_db):
            return np.zeros_like(np.asarray(self.gain, dtype=float))
        return self.tx_power * 10 ** (-self.pathloss_db / 10) * np.asarray(self.gain, dtype=float)


@dataclass(frozen=True, eq=False)
class SinrRecord:
    per_subband: np.ndarray
    wideband: float
    slot: int = -1
    link: str = ""

    def __post_init__(self):
        if np.any(~np.isfinite(self.per_subband)) or np.any(self.per_subband < 0):
            raise ValueError("SINR values must be finite and >= 0")


def compute_sinr(
    serving: LinkTerms,
    interferers: Sequence[LinkTerms],
    bandwidth: float,
    noise_psd: float = thermal_noise_psd(),
    noise_figure_db: float = 0.0,
    slot: int = -1,
    link: str = "",
) -> SinrRecord:
    """Per-sub-band SINR; ``wideband`` is the linear mean over sub-bands."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    signal = np.atleast_1d(serving.received())
    interference = np.zeros_like(signal)
    for term in interferers:
        interference = interference + term.received()
    noise = bandwidth * noise_psd * 10 ** (noise_figure_db / 10)
    denom = interference + noise
    with np.errstate(divide="ignore", invalid="ignore"):
        sinr = np.where(signal > 0, signal / denom, 0.0)
    return SinrRecord(per_subband=sinr, wideband=float(np.mean(sinr)), slot=slot, link=link)
