"""Frame structure parameters shared by PHY, MAC and the scheduler.

A single immutable :class:`FrameConfig` instance is built at scenario start
and handed to every layer. Field names are snake_case; the configuration
file uses the CamelCase names listed in :data:`FILE_KEYS`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping


class ConfigError(ValueError):
    """Raised when a frame configuration violates one of its invariants.

    ``problems`` holds ``(file_key, message)`` pairs so callers can point at
    the offending key.
    """

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{key}: {msg}" for key, msg in problems))


# file key -> dataclass field
FILE_KEYS: dict[str, str] = {
    "SymbolPerSlot": "symbols_per_slot",
    "SymbolLength": "symbol_length",
    "SlotsPerSubframe": "slots_per_subframe",
    "SubframePerFrame": "subframes_per_frame",
    "NumReferenceSymbols": "num_reference_symbols",
    "TDDControlDataPattern": "tdd_pattern",
    "SubcarriersPerSubband": "subcarriers_per_subband",
    "SubbandsPerRB": "subbands_per_rb",
    "SubbandWidth": "subband_width",
    "NumResourceBlock": "num_resource_blocks",
    "CenterFreq": "center_freq",
    "GuardTime": "guard_time",
    "L1L2ControlLatency": "l1l2_control_latency",
}
FIELD_KEYS = {v: k for k, v in FILE_KEYS.items()}

_COUNTS = (
    "symbols_per_slot",
    "slots_per_subframe",
    "subframes_per_frame",
    "subcarriers_per_subband",
    "subbands_per_rb",
    "num_resource_blocks",
)
_POSITIVE = ("symbol_length", "subband_width", "center_freq", "guard_time")


@dataclass(frozen=True)
class FrameConfig:
    symbols_per_slot: int = 30
    symbol_length: float = 4.16e-6
    slots_per_subframe: int = 8
    subframes_per_frame: int = 10
    num_reference_symbols: int = 6
    tdd_pattern: str = "ccdddddd"
    subcarriers_per_subband: int = 48
    subbands_per_rb: int = 18
    subband_width: float = 13.89e6
    num_resource_blocks: int = 4
    center_freq: float = 28e9
    guard_time: float = 1e-6
    l1l2_control_latency: int = 2

    def __post_init__(self):
        problems = validate_fields(asdict(self))
        if problems:
            raise ConfigError(problems)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "FrameConfig":
        """Build from a mapping keyed by the file names (``SymbolPerSlot``...).

        Unknown keys are rejected; missing keys keep their defaults.
        """
        unknown = [k for k in values if k not in FILE_KEYS]
        if unknown:
            raise ConfigError([(k, "unknown frame parameter") for k in unknown])
        kwargs = {FILE_KEYS[k]: v for k, v in values.items()}
        problems = validate_fields({**asdict(cls()), **kwargs})
        if problems:
            raise ConfigError(problems)
        return cls(**kwargs)

    def to_mapping(self) -> dict[str, Any]:
        return {FIELD_KEYS[f.name]: getattr(self, f.name) for f in fields(self)}

    # convenience accessors used all over the simulator
    @property
    def tti(self) -> float:
        return tti(self)

    @property
    def num_subbands(self) -> int:
        return self.subbands_per_rb * self.num_resource_blocks

    @property
    def tti_ns(self) -> int:
        """Slot duration in integer nanoseconds (event clock resolution)."""
        return self.symbols_per_slot * round(self.symbol_length * 1e9)

    @property
    def guard_symbols(self) -> int:
        """Symbols lost in a slot that follows a change of direction."""
        return math.ceil(self.guard_time / self.symbol_length - 1e-9)


def validate_fields(values: Mapping[str, Any]) -> list[tuple[str, str]]:
    problems: list[tuple[str, str]] = []
    for name in _COUNTS + ("num_reference_symbols", "l1l2_control_latency"):
        v = values[name]
        if isinstance(v, bool) or not isinstance(v, int):
            problems.append((FIELD_KEYS[name], f"must be an integer, got {v!r}"))
    for name in _POSITIVE:
        v = values[name]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            problems.append((FIELD_KEYS[name], f"must be a number, got {v!r}"))
    if problems:
        return problems

    for name in _COUNTS:
        if values[name] < 1:
            problems.append((FIELD_KEYS[name], "must be >= 1"))
    for name in _POSITIVE:
        if not (math.isfinite(values[name]) and values[name] > 0):
            problems.append((FIELD_KEYS[name], "must be > 0"))
    if values["num_reference_symbols"] < 0:
        problems.append(("NumReferenceSymbols", "must be >= 0"))
    elif values["num_reference_symbols"] >= values["symbols_per_slot"]:
        problems.append(("NumReferenceSymbols", "must be < SymbolPerSlot"))
    if values["l1l2_control_latency"] < 0:
        problems.append(("L1L2ControlLatency", "must be >= 0"))

    pattern = values["tdd_pattern"]
    if not isinstance(pattern, str):
        problems.append(("TDDControlDataPattern", f"must be a string, got {pattern!r}"))
    else:
        bad = sorted(set(pattern) - {"c", "d"})
        if bad:
            problems.append(
                ("TDDControlDataPattern", f"invalid character(s) {''.join(bad)!r}; only 'c' and 'd' allowed")
            )
        if len(pattern) != values["slots_per_subframe"]:
            problems.append(
                (
                    "TDDControlDataPattern",
                    f"length {len(pattern)} does not match SlotsPerSubframe={values['slots_per_subframe']}",
                )
            )
    return problems


def tti(cfg: FrameConfig) -> float:
    """Duration of one slot in seconds."""
    return cfg.symbols_per_slot * cfg.symbol_length


def rb_bandwidth(cfg: FrameConfig) -> float:
    return cfg.subbands_per_rb * cfg.subband_width


def system_bandwidth(cfg: FrameConfig) -> float:
    return rb_bandwidth(cfg) * cfg.num_resource_blocks


def resource_elements_per_slot(cfg: FrameConfig) -> int:
    return cfg.symbols_per_slot * cfg.subcarriers_per_subband * cfg.subbands_per_rb * cfg.num_resource_blocks
