"""Adaptive modulation and coding: CQI -> MCS -> transport block size."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from importlib import resources

from ..config import FrameConfig

CRC_BITS = 24
MAX_CQI = 15


@dataclass(frozen=True)
class AmcEntry:
    cqi: int
    mcs: int
    modulation_order: int
    code_rate: float
    spectral_efficiency: float


@dataclass(frozen=True)
class AmcTable:
    """Entries for CQI 1..15; CQI 0 means out of range and maps to nothing."""

    entries: tuple[AmcEntry, ...]

    def __post_init__(self):
        cqis = [e.cqi for e in self.entries]
        if cqis != list(range(1, len(cqis) + 1)) or not cqis:
            raise ValueError("AMC entries must cover CQI 1..N in order")
        eff = [e.spectral_efficiency for e in self.entries]
        if any(b < a for a, b in zip(eff, eff[1:])):
            raise ValueError("spectral efficiency must be nondecreasing in CQI")

    @property
    def max_cqi(self) -> int:
        return len(self.entries)

    def entry(self, cqi: int) -> AmcEntry:
        if not 1 <= cqi <= self.max_cqi:
            raise KeyError(f"no AMC entry for CQI {cqi}")
        return self.entries[cqi - 1]

    def cqi_to_mcs(self, cqi: int) -> int:
        return 0 if cqi <= 0 else self.entry(cqi).mcs

    def spectral_efficiency(self, cqi: int) -> float:
        return 0.0 if cqi <= 0 else self.entry(cqi).spectral_efficiency

    def cqi_for_mcs(self, mcs: int) -> int:
        for e in self.entries:
            if e.mcs == mcs:
                return e.cqi
        raise KeyError(f"unknown MCS {mcs}")


def parse_amc_table(text: str) -> AmcTable:
    rows = csv.DictReader(io.StringIO(text))
    return AmcTable(
        tuple(
            AmcEntry(
                cqi=int(r["cqi"]),
                mcs=int(r["mcs"]),
                modulation_order=int(r["modulation_order"]),
                code_rate=float(r["code_rate"]),
                spectral_efficiency=float(r["spectral_efficiency"]),
            )
            for r in rows
        )
    )


def load_amc_table(path: str | os.PathLike | None = None) -> AmcTable:
    if path is None:
        return parse_amc_table(resources.files("mmwsim.data").joinpath("amc_default.csv").read_text())
    with open(path) as fh:
        return parse_amc_table(fh.read())


def data_symbols(cfg: FrameConfig, guard_symbols: int = 0) -> int:
    return max(0, cfg.symbols_per_slot - cfg.num_reference_symbols - guard_symbols)


def cqi_to_tb_size(cqi: int, amc: AmcTable, cfg: FrameConfig, guard_symbols: int = 0) -> int:
    """Payload bits of one slot-wide TB: ``floor(eff * REs) - CRC``, floored at 0.

    ``guard_symbols`` removes symbols lost to a direction switch.
    """
    if cqi <= 0:
        return 0
    res = data_symbols(cfg, guard_symbols) * cfg.subcarriers_per_subband * cfg.subbands_per_rb * cfg.num_resource_blocks
    return max(0, math.floor(amc.spectral_efficiency(cqi) * res) - CRC_BITS)


def tb_size_ladder(amc: AmcTable, cfg: FrameConfig) -> set[int]:
    """Every TB size the AMC can produce, for plain and guard-shortened slots."""
    sizes = {0}
    for guard in {0, cfg.guard_symbols}:
        sizes.update(cqi_to_tb_size(c, amc, cfg, guard) for c in range(1, amc.max_cqi + 1))
    return sizes
