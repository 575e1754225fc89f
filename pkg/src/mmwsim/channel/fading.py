"""Cluster/subpath MIMO channel: spatial signatures and small-scale fading.

The channel matrix between a transmitter with ``n_tx`` elements and a
receiver with ``n_rx`` elements is

    H(t, f) = sqrt(n_rx * n_tx) * sum_l g_l(t, f) u_rx,l u_tx,l^H

where the stored signatures ``u`` have unit norm, so the prefactor restores
the array gain of the unnormalised steering vectors ``sqrt(n) * u``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .propagation import LinkState

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True, eq=False)
class SubpathParams:
    """Per-subpath parameters, flattened over clusters.

    ``cluster[i]`` gives the cluster index of subpath ``i``.
    """

    power: np.ndarray
    aoa_rel_motion: np.ndarray
    delay: np.ndarray
    cluster: np.ndarray

    def __post_init__(self):
        n = len(self.power)
        if not (len(self.aoa_rel_motion) == len(self.delay) == len(self.cluster) == n):
            raise ValueError("subpath arrays must have equal length")
        if np.any(self.power < 0):
            raise ValueError("subpath powers must be >= 0")

    def __len__(self):
        return len(self.power)

    @property
    def num_clusters(self) -> int:
        return int(len(np.unique(self.cluster)))


@dataclass(frozen=True, eq=False)
class SpatialChannel:
    """One entry of the realization pool: signatures plus subpath parameters."""

    realization_id: int
    tx_spatial: np.ndarray  # (n_tx, L)
    rx_spatial: np.ndarray  # (n_rx, L)
    subpaths: SubpathParams

    def __post_init__(self):
        if self.tx_spatial.ndim != 2 or self.rx_spatial.ndim != 2:
            raise ValueError("spatial matrices must be 2-D")
        L = len(self.subpaths)
        if self.tx_spatial.shape[1] != L or self.rx_spatial.shape[1] != L:
            raise ValueError(
                f"spatial matrices have {self.tx_spatial.shape[1]}/{self.rx_spatial.shape[1]} "
                f"columns, expected {L} subpaths"
            )

    @property
    def n_tx(self) -> int:
        return self.tx_spatial.shape[0]

    @property
    def n_rx(self) -> int:
        return self.rx_spatial.shape[0]


@dataclass(eq=False)
class ChannelRealization:
    link_state: LinkState
    shadowing_db: float
    spatial: SpatialChannel
    last_large_scale_update: float = 0.0
    epoch: int = 0

    @property
    def tx_spatial_matrix(self) -> np.ndarray:
        return self.spatial.tx_spatial

    @property
    def rx_spatial_matrix(self) -> np.ndarray:
        return self.spatial.rx_spatial

    @property
    def subpaths(self) -> SubpathParams:
        return self.spatial.subpaths

    @property
    def realization_id(self) -> int:
        return self.spatial.realization_id


def ula_signature(n: int, angle: float) -> np.ndarray:
    """Unit-norm half-wavelength ULA response ``exp(-i pi k sin(angle)) / sqrt(n)``."""
    k = np.arange(n)
    return np.exp(-1j * np.pi * k * np.sin(angle)) / math.sqrt(n)


def doppler_shift(speed: float, center_freq: float) -> float:
    return speed * center_freq / SPEED_OF_LIGHT


def small_scale_gain(t: float, f: float, power: float, aoa_rel_motion: float, delay: float, doppler_max: float) -> complex:
    """Single-subpath phasor ``sqrt(P) exp(i(2 pi f_d cos(w) t - 2 pi tau f))``."""
    if power < 0:
        raise ValueError("power spread must be >= 0")
    phase = 2 * math.pi * doppler_max * math.cos(aoa_rel_motion) * t - 2 * math.pi * delay * f
    return math.sqrt(power) * complex(math.cos(phase), math.sin(phase))


def subpath_gains(subpaths: SubpathParams, t: float, freqs, doppler_max: float) -> np.ndarray:
    """Vectorised :func:`small_scale_gain`; returns shape ``(len(freqs), L)``."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    doppler_phase = 2 * np.pi * doppler_max * np.cos(subpaths.aoa_rel_motion) * t
    phase = doppler_phase[None, :] - 2 * np.pi * np.outer(freqs, subpaths.delay)
    return np.sqrt(subpaths.power)[None, :] * np.exp(1j * phase)


def assemble_channel(realization, t: float, f: float, doppler_max: float) -> np.ndarray:
    """Channel matrix ``(n_rx, n_tx)`` at time ``t`` and band offset ``f``."""
    spatial = getattr(realization, "spatial", realization)
    g = subpath_gains(spatial.subpaths, t, [f], doppler_max)[0]
    scale = math.sqrt(spatial.n_rx * spatial.n_tx)
    return scale * (spatial.rx_spatial * g[None, :]) @ spatial.tx_spatial.conj().T


def beam_projections(spatial: SpatialChannel, rx_weights: np.ndarray, tx_weights: np.ndarray) -> np.ndarray:
    """Per-subpath factors ``(w_rx^H u_rx,l)(u_tx,l^H w_tx)`` scaled by the array gain.

    With these, the beamformed gain over many frequencies is
    ``|gains @ proj|**2`` without rebuilding H.
    """
    if rx_weights.shape[0] != spatial.n_rx or tx_weights.shape[0] != spatial.n_tx:
        raise ValueError(
            f"weights ({rx_weights.shape[0]}, {tx_weights.shape[0]}) do not match "
            f"antennas ({spatial.n_rx}, {spatial.n_tx})"
        )
    scale = math.sqrt(spatial.n_rx * spatial.n_tx)
    return scale * (rx_weights.conj() @ spatial.rx_spatial) * (spatial.tx_spatial.conj().T @ tx_weights)


def beamformed_gains(spatial: SpatialChannel, projections: np.ndarray, t: float, freqs, doppler_max: float) -> np.ndarray:
    g = subpath_gains(spatial.subpaths, t, freqs, doppler_max)
    return np.abs(g @ projections) ** 2


def update_large_scale(realization: ChannelRealization, now: float, update_period: float, pool, rng) -> ChannelRealization:
    """Swap in a random pool entry once ``update_period`` has elapsed.

    Link state and shadowing are kept; only signatures and subpaths change.
    """
    if len(pool) == 0:
        raise ValueError("realization pool is empty")
    if now - realization.last_large_scale_update < update_period - 1e-12:
        return realization
    entry = pool[int(rng.integers(len(pool)))]
    return dataclasses.replace(
        realization, spatial=entry, last_large_scale_update=now, epoch=realization.epoch + 1
    )
