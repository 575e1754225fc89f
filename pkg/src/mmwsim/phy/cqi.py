from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import FrameConfig
from ..mac.amc import AmcTable, cqi_to_tb_size
from .error_model import MiesmTable, bler_for_sinr, effective_sinr


@dataclass(frozen=True, eq=False)
class CqiTable:
    """Lowest linear SINR at which each CQI 1..N meets the BLER target."""

    thresholds: np.ndarray
    bler_target: float

    def __post_init__(self):
        if np.any(np.diff(self.thresholds) < 0):
            raise ValueError("CQI thresholds must be nondecreasing")

    @property
    def thresholds_db(self) -> np.ndarray:
        return 10 * np.log10(self.thresholds)


def sinr_to_cqi(wideband_sinr: float, cqi_table: CqiTable) -> int:
    """Highest CQI whose threshold is <= the SINR (0 if below all)."""
    return int(np.searchsorted(cqi_table.thresholds, wideband_sinr, side="right"))


def cqi_from_subbands(per_subband_sinr, cqi_table: CqiTable, amc: AmcTable, miesm: MiesmTable) -> int:
    """Highest CQI whose MIESM effective SINR, taken with that CQI's MCS, meets its threshold.

    Reduces to :func:`sinr_to_cqi` on a frequency-flat channel.
    """
    for cqi in range(amc.max_cqi, 0, -1):
        if effective_sinr(per_subband_sinr, amc.cqi_to_mcs(cqi), miesm) >= cqi_table.thresholds[cqi - 1]:
            return cqi
    return 0


def build_cqi_table(
    amc: AmcTable,
    miesm: MiesmTable,
    cfg: FrameConfig,
    bler_target: float = 0.1,
    lo_db: float = -30.0,
    hi_db: float = 60.0,
) -> CqiTable:
    """Invert the SINR -> TB BLER chain for every CQI by bisection.

    Each threshold is the smallest SINR (to ~1e-6 dB) whose flat-channel TB
    BLER for that CQI's MCS and full-slot TB size is <= ``bler_target``.
    """
    if not 0 < bler_target < 1:
        raise ValueError("bler_target must be in (0, 1)")
    thresholds = []
    for cqi in range(1, amc.max_cqi + 1):
        mcs = amc.cqi_to_mcs(cqi)
        tb = cqi_to_tb_size(cqi, amc, cfg)

        def ok(db):
            return bler_for_sinr(10 ** (db / 10), mcs, tb, miesm) <= bler_target

        if not ok(hi_db):
            thresholds.append(np.inf)
            continue
        lo, hi = lo_db, hi_db
        if ok(lo):
            hi = lo
        while hi - lo > 1e-6:
            mid = 0.5 * (lo + hi)
            if ok(mid):
                hi = mid
            else:
                lo = mid
        thresholds.append(10 ** (hi / 10))
    # a higher CQI never needs less SINR than a lower one
    return CqiTable(thresholds=np.maximum.accumulate(np.array(thresholds)), bler_target=bler_target)
