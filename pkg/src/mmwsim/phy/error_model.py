"""MIESM link-to-system error model.

SINR is mapped to mean mutual information per coded bit (MMIB), averaged
over the occupied sub-bands, and turned into a codeblock error probability
with a Gaussian CDF fit. Transport block errors combine the codeblocks.
"""

from __future__ import annotations

import enum
import hashlib
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np
from scipy.special import erf

CRC_BITS = 24
MAX_CODEBLOCK_BITS = 6144


class MiesmTableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MiesmTable:
    """SINR->MMIB curves per modulation order and BLER fits per (MCS, CB class).

    ``curves[q] = (sinr_linear, mmib)`` with a leading ``(0, 0)`` anchor.
    ``fits[mcs]`` is a list of ``(cb_size_class, b, c)`` sorted by class.
    """

    curves: dict[int, tuple[np.ndarray, np.ndarray]]
    fits: dict[int, list[tuple[int, float, float]]]
    modulation: dict[int, int]
    digest: str = ""

    def curve_for_mcs(self, mcs: int):
        try:
            return self.curves[self.modulation[mcs]]
        except KeyError:
            raise KeyError(f"no MMIB curve for MCS {mcs}") from None

    def fit(self, mcs: int, cb_size: int) -> tuple[float, float]:
        """``(b, c)`` of the smallest size class that holds ``cb_size`` bits."""
        try:
            rows = self.fits[mcs]
        except KeyError:
            raise KeyError(f"no BLER fit for MCS {mcs}") from None
        for size_class, b, c in rows:
            if cb_size <= size_class:
                return b, c
        return rows[-1][1], rows[-1][2]


def parse_miesm_table(text: str, digest: str = "") -> MiesmTable:
    raw_curves: dict[int, list[tuple[float, float]]] = {}
    fits: dict[int, list[tuple[int, float, float]]] = {}
    modulation: dict[int, int] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "curve":
                current = int(parts[1])
                raw_curves.setdefault(current, [])
            elif parts[0] == "fit":
                mcs, q, size_class = int(parts[1]), int(parts[2]), int(parts[3])
                b, c = float(parts[4]), float(parts[5])
                if c <= 0:
                    raise MiesmTableError(f"line {lineno}: fit spread c must be > 0")
                if modulation.setdefault(mcs, q) != q:
                    raise MiesmTableError(f"line {lineno}: MCS {mcs} listed with two modulation orders")
                fits.setdefault(mcs, []).append((size_class, b, c))
            else:
                if current is None:
                    raise MiesmTableError(f"line {lineno}: curve point before any 'curve' header")
                raw_curves[current].append((float(parts[0]), float(parts[1])))
        except (IndexError, ValueError) as exc:
            if isinstance(exc, MiesmTableError):
                raise
            raise MiesmTableError(f"line {lineno}: cannot parse {line!r}") from None

    curves = {}
    for q, points in raw_curves.items():
        sinr_db = np.array([p[0] for p in points])
        mmib = np.array([p[1] for p in points])
        if np.any(np.diff(sinr_db) <= 0):
            raise MiesmTableError(f"curve {q}: SINR points must be strictly increasing")
        if np.any(np.diff(mmib) < 0) or mmib.min() < 0 or mmib.max() > 1:
            raise MiesmTableError(f"curve {q}: MMIB must be nondecreasing within [0, 1]")
        curves[q] = (np.concatenate([[0.0], 10 ** (sinr_db / 10)]), np.concatenate([[0.0], mmib]))
    for mcs, q in modulation.items():
        if q not in curves:
            raise MiesmTableError(f"MCS {mcs} uses modulation order {q} which has no curve")
        fits[mcs].sort()
    return MiesmTable(curves=curves, fits=fits, modulation=modulation, digest=digest)


def load_miesm_table(path: str | os.PathLike | None = None) -> MiesmTable:
    """Load a table file; ``None`` loads the bundled default."""
    if path is None:
        data = resources.files("mmwsim.data").joinpath("miesm_default.txt").read_bytes()
    else:
        with open(path, "rb") as fh:
            data = fh.read()
    return parse_miesm_table(data.decode("utf-8"), digest=hashlib.sha256(data).hexdigest())


_DEFAULT_TABLE: MiesmTable | None = None


def default_miesm_table() -> MiesmTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_miesm_table()
    return _DEFAULT_TABLE


def sinr_to_mmib(sinr, mcs: int, table: MiesmTable):
    """Interpolate the MMIB curve of ``mcs``'s modulation at linear ``sinr``."""
    xs, ys = table.curve_for_mcs(mcs)
    out = np.clip(np.interp(np.asarray(sinr, dtype=float), xs, ys), 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def codeblock_bler(gamma, b: float, c: float):
    """``0.5 * (1 - erf((gamma - b) / (sqrt(2) c)))``."""
    if not c > 0:
        raise ValueError(f"fit spread c must be > 0, got {c}")
    out = 0.5 * (1.0 - erf((np.asarray(gamma, dtype=float) - b) / (math.sqrt(2.0) * c)))
    return float(out) if np.ndim(out) == 0 else out


def transport_block_bler(cb_blers: Sequence[float]) -> float:
    p = np.asarray(cb_blers, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("codeblock BLERs must lie in [0, 1]")
    return float(1.0 - np.prod(1.0 - p))


def segment_transport_block(payload_bits: int, max_cb_bits: int = MAX_CODEBLOCK_BITS, crc_bits: int = CRC_BITS) -> list[int]:
    """Equal-size codeblocks for a TB of ``payload_bits`` (CRC excluded).

    Blocks that need segmenting carry an extra per-block CRC; filler bits
    round the total up to a multiple of the block count.
    """
    if payload_bits <= 0:
        return []
    total = payload_bits + crc_bits
    if total <= max_cb_bits:
        return [total]
    count = math.ceil(total / (max_cb_bits - crc_bits))
    size = math.ceil((total + count * crc_bits) / count)
    return [size] * count


@dataclass(eq=False)
class TransportBlock:
    size: int
    mcs: int
    codeblocks: list[tuple[int, float]] = field(default_factory=list)
    crc_length: int = CRC_BITS


def effective_mmib(per_subband_sinr, mcs: int, table: MiesmTable) -> float:
    return float(np.mean(sinr_to_mmib(np.atleast_1d(per_subband_sinr), mcs, table)))


def effective_sinr(per_subband_sinr, mcs: int, table: MiesmTable) -> float:
    """Flat-channel SINR with the same mean MMIB as ``per_subband_sinr``.

    Inverts the (monotone) curve of ``mcs``'s modulation by interpolation;
    on flat plateaus the lowest matching SINR is returned.
    """
    gamma = effective_mmib(per_subband_sinr, mcs, table)
    xs, ys = table.curve_for_mcs(mcs)
    if gamma >= ys[-1]:
        return float(xs[np.searchsorted(ys, ys[-1])])
    i = int(np.searchsorted(ys, gamma, side="left"))
    if i == 0:
        return 0.0
    x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
    return float(x0 + (gamma - y0) * (x1 - x0) / (y1 - y0))


def build_transport_block(tb_size: int, mcs: int, per_subband_sinr, table: MiesmTable, max_cb_bits: int = MAX_CODEBLOCK_BITS) -> TransportBlock:
    gamma = effective_mmib(per_subband_sinr, mcs, table)
    return TransportBlock(
        size=tb_size,
        mcs=mcs,
        codeblocks=[(n, gamma) for n in segment_transport_block(tb_size, max_cb_bits)],
    )


def tb_bler(tb: TransportBlock, table: MiesmTable) -> float:
    if not tb.codeblocks:
        return 0.0
    blers = []
    for size, gamma in tb.codeblocks:
        b, c = table.fit(tb.mcs, size)
        blers.append(codeblock_bler(gamma, b, c))
    return transport_block_bler(blers)


def bler_for_sinr(per_subband_sinr, mcs: int, tb_size: int, table: MiesmTable) -> float:
    """Whole chain: SINR -> MMIB -> CB BLER -> TB BLER."""
    return tb_bler(build_transport_block(tb_size, mcs, per_subband_sinr, table), table)


class DecodeOutcome(str, enum.Enum):
    DECODED = "decoded"
    DROPPED = "dropped"


def decide_decode(tb_bler_value: float, uniform_draw: float) -> DecodeOutcome:
    """Drop iff ``uniform_draw < tb_bler``; a drop means nothing is forwarded up."""
    if not (0 <= tb_bler_value <= 1 and 0 <= uniform_draw <= 1):
        raise ValueError("BLER and draw must lie in [0, 1]")
    return DecodeOutcome.DROPPED if uniform_draw < tb_bler_value else DecodeOutcome.DECODED
