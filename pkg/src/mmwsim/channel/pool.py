"""Generation and storage of the spatial-channel realization pool.

Pool file layout (all little-endian)::

    magic      8 bytes   b"MMWPOOL1"
    count      uint32
    then per realization:
      realization_id  uint32
      n_tx, n_rx      uint32, uint32
      n_subpaths      uint32
      cluster         int32[n_subpaths]
      power           float64[n_subpaths]
      aoa_rel_motion  float64[n_subpaths]   radians
      delay           float64[n_subpaths]   seconds
      tx_spatial      float64[n_tx * n_subpaths * 2]   row-major, re/im interleaved
      rx_spatial      float64[n_rx * n_subpaths * 2]   row-major, re/im interleaved
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass

import numpy as np

from .fading import SpatialChannel, SubpathParams, ula_signature

MAGIC = b"MMWPOOL1"


@dataclass(frozen=True)
class ClusterStats:
    """Environment statistics for the cluster/subpath draw."""

    min_clusters: int = 1
    max_clusters: int = 4
    min_subpaths: int = 1
    max_subpaths: int = 10
    cluster_power_decay: float = 2.8  # r in U^(r-1)
    cluster_shadow_db: float = 4.0
    angular_spread_deg: float = 10.0
    cluster_delay_mean: float = 30e-9
    subpath_delay_spread: float = 2e-9

    def __post_init__(self):
        if not 1 <= self.min_clusters <= self.max_clusters:
            raise ValueError("need 1 <= min_clusters <= max_clusters")
        if not 1 <= self.min_subpaths <= self.max_subpaths:
            raise ValueError("need 1 <= min_subpaths <= max_subpaths")
        if self.cluster_delay_mean < 0 or self.subpath_delay_spread < 0 or self.angular_spread_deg < 0:
            raise ValueError("spreads must be >= 0")


def _one_realization(rng: np.random.Generator, realization_id: int, stats: ClusterStats, n_tx: int, n_rx: int) -> SpatialChannel:
    K = int(rng.integers(stats.min_clusters, stats.max_clusters + 1))
    L = rng.integers(stats.min_subpaths, stats.max_subpaths + 1, size=K)

    u = rng.uniform(size=K)
    z = rng.normal(0.0, stats.cluster_shadow_db, size=K)
    cluster_power = u ** (stats.cluster_power_decay - 1) * 10 ** (-0.1 * z)
    cluster_power /= cluster_power.sum()

    aod_centre = rng.uniform(-np.pi / 2, np.pi / 2, size=K)
    aoa_centre = rng.uniform(-np.pi / 2, np.pi / 2, size=K)
    motion_dir = rng.uniform(0, 2 * np.pi)
    cluster_delay = rng.exponential(stats.cluster_delay_mean, size=K) if stats.cluster_delay_mean > 0 else np.zeros(K)
    spread = np.deg2rad(stats.angular_spread_deg)

    cluster = np.repeat(np.arange(K), L)
    total = int(L.sum())
    power = np.repeat(cluster_power / L, L)
    aod = aod_centre[cluster] + rng.normal(0.0, spread, size=total)
    aoa = aoa_centre[cluster] + rng.normal(0.0, spread, size=total)
    delay = cluster_delay[cluster] + rng.uniform(0.0, stats.subpath_delay_spread, size=total)
    omega = np.mod(aoa + motion_dir, 2 * np.pi)

    power = power / power.sum()
    tx = np.stack([ula_signature(n_tx, a) for a in aod], axis=1)
    rx = np.stack([ula_signature(n_rx, a) for a in aoa], axis=1)
    return SpatialChannel(
        realization_id=realization_id,
        tx_spatial=tx,
        rx_spatial=rx,
        subpaths=SubpathParams(power=power, aoa_rel_motion=omega, delay=delay, cluster=cluster.astype(np.int32)),
    )


def generate_realization_pool(seed, count: int, cluster_stats: ClusterStats | None = None, tx_antennas: int = 64, rx_antennas: int = 16) -> list[SpatialChannel]:
    """Deterministic pool of ``count`` spatial channels.

    ``seed`` may be an int or a :class:`numpy.random.SeedSequence`; each
    realization gets its own child stream so entries are independent of
    ``count``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if tx_antennas < 1 or rx_antennas < 1:
        raise ValueError("antenna counts must be >= 1")
    stats = cluster_stats or ClusterStats()
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(count)
    return [
        _one_realization(np.random.default_rng(child), i, stats, tx_antennas, rx_antennas)
        for i, child in enumerate(children)
    ]


def _complex_to_bytes(m: np.ndarray) -> bytes:
    out = np.empty(m.shape + (2,), dtype="<f8")
    out[..., 0] = m.real
    out[..., 1] = m.imag
    return out.tobytes(order="C")


def dump_pool(pool, fh) -> None:
    fh.write(MAGIC)
    fh.write(struct.pack("<I", len(pool)))
    for entry in pool:
        sp = entry.subpaths
        L = len(sp)
        fh.write(struct.pack("<4I", entry.realization_id, entry.n_tx, entry.n_rx, L))
        fh.write(np.asarray(sp.cluster, dtype="<i4").tobytes())
        for arr in (sp.power, sp.aoa_rel_motion, sp.delay):
            fh.write(np.asarray(arr, dtype="<f8").tobytes())
        fh.write(_complex_to_bytes(entry.tx_spatial))
        fh.write(_complex_to_bytes(entry.rx_spatial))


def save_pool(pool, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        dump_pool(pool, fh)


def _read(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ValueError("truncated pool file")
    return data


def parse_pool(fh) -> list[SpatialChannel]:
    if _read(fh, 8) != MAGIC:
        raise ValueError("not a realization pool file (bad magic)")
    (count,) = struct.unpack("<I", _read(fh, 4))
    pool = []
    for _ in range(count):
        rid, n_tx, n_rx, L = struct.unpack("<4I", _read(fh, 16))
        cluster = np.frombuffer(_read(fh, 4 * L), dtype="<i4").astype(np.int32)
        power, omega, delay = (np.frombuffer(_read(fh, 8 * L), dtype="<f8").astype(float) for _ in range(3))

        def matrix(n):
            raw = np.frombuffer(_read(fh, 16 * n * L), dtype="<f8").reshape(n, L, 2)
            return raw[..., 0] + 1j * raw[..., 1]

        tx = matrix(n_tx)
        rx = matrix(n_rx)
        pool.append(
            SpatialChannel(
                realization_id=rid,
                tx_spatial=tx,
                rx_spatial=rx,
                subpaths=SubpathParams(power=power, aoa_rel_motion=omega, delay=delay, cluster=cluster),
            )
        )
    if fh.read(1):
        raise ValueError("trailing data after pool entries")
    return pool


def load_pool(path: str | os.PathLike) -> list[SpatialChannel]:
    with open(path, "rb") as fh:
        return parse_pool(fh)


def pool_to_bytes(pool) -> bytes:
    buf = io.BytesIO()
    dump_pool(pool, buf)
    return buf.getvalue()
