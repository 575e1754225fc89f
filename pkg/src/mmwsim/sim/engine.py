"""Minimal deterministic discrete-event loop on an integer-nanosecond clock."""

from __future__ import annotations

import enum
import heapq
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable


class EventKind(str, enum.Enum):
    FRAME_START = "FrameStart"
    SUBFRAME_START = "SubframeStart"
    SLOT_START = "SlotStart"
    LARGE_SCALE_UPDATE = "LargeScaleUpdate"
    TRAFFIC_ARRIVAL = "TrafficArrival"


@dataclass(order=True)
class Event:
    time_ns: int
    seq: int
    kind: EventKind = field(compare=False)
    handler: Callable[["Event"], None] = field(compare=False, repr=False)
    payload: Any = field(default=None, compare=False)


class EventLoop:
    """Events run in ``(time_ns, seq)`` order; ``seq`` is insertion order."""

    def __init__(self):
        self._heap: list[Event] = []
        self._seq = itertools.count()
        self.now_ns = 0
        self.counts: Counter = Counter()

    def schedule(self, time_ns: int, kind: EventKind, handler, payload=None) -> Event:
        if time_ns < self.now_ns:
            raise ValueError(f"cannot schedule {kind.value} at {time_ns} ns, now is {self.now_ns} ns")
        ev = Event(int(time_ns), next(self._seq), kind, handler, payload)
        heapq.heappush(self._heap, ev)
        return ev

    def run(self, until_ns: int) -> None:
        """Process every event with ``time_ns <= until_ns``."""
        while self._heap and self._heap[0].time_ns <= until_ns:
            ev = heapq.heappop(self._heap)
            self.now_ns = ev.time_ns
            self.counts[ev.kind] += 1
            ev.handler(ev)

    def __len__(self):
        return len(self._heap)
