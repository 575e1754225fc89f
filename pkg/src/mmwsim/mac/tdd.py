from __future__ import annotations

import enum
import math


class SlotKind(str, enum.Enum):
    CONTROL = "ctrl"
    DATA = "data"


class Direction(str, enum.Enum):
    DL = "DL"
    UL = "UL"


def assign_tdd_slots(pattern: str, slots: int | None = None) -> list[tuple[SlotKind, Direction]]:
    """Static TDD layout of one subframe.

    Control slots alternate DL, UL, DL, ... in pattern order. Of the ``n``
    data slots the first ``ceil(n/2)`` go to DL and the rest to UL, which
    keeps one DL->UL switch inside the data region.
    """
    if slots is None:
        slots = len(pattern)
    if len(pattern) != slots or set(pattern) - {"c", "d"}:
        raise ValueError(f"invalid TDD pattern {pattern!r} for {slots} slots")
    n_data = pattern.count("d")
    n_dl = math.ceil(n_data / 2)
    layout = []
    ctrl_seen = data_seen = 0
    for ch in pattern:
        if ch == "c":
            layout.append((SlotKind.CONTROL, Direction.DL if ctrl_seen % 2 == 0 else Direction.UL))
            ctrl_seen += 1
        else:
            layout.append((SlotKind.DATA, Direction.DL if data_seen < n_dl else Direction.UL))
            data_seen += 1
    return layout


def switching_slots(layout) -> list[bool]:
    """True for slots whose direction differs from the slot before.

    Subframes repeat, so slot 0 is compared with the last slot.
    """
    return [layout[i][1] != layout[i - 1][1] for i in range(len(layout))]
