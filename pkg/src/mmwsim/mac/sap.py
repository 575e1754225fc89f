"""PHY-MAC and MAC-scheduler service access points, MAC queues.

Every SAP message knows how to render itself as one log line; the field
order of each message is fixed by :meth:`fields`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable

from ..config import FrameConfig
from .scheduler import AllocationMap, CqiReport, RoundRobinScheduler, empty_allocation


@dataclass(frozen=True)
class SubframeIndication:
    """Sent by the PHY at the start of every slot; ``slot`` counts from 1."""

    frame: int
    subframe: int  # within the frame
    slot: int

    def fields(self):
        return (("frame", self.frame), ("subframe", self.subframe), ("slot", self.slot))


@dataclass(frozen=True)
class SchedTriggerReq:
    target_subframe: int  # absolute subframe index

    def fields(self):
        return (("target_subframe", self.target_subframe),)


@dataclass(frozen=True)
class SchedConfigInd:
    allocation: AllocationMap

    def fields(self):
        return (("subframe", self.allocation.subframe), ("map", self.allocation.encode()))


@dataclass(frozen=True)
class ResourceAllocationMsg:
    allocation: AllocationMap

    def fields(self):
        return (("subframe", self.allocation.subframe), ("map", self.allocation.encode()))


@dataclass(frozen=True)
class CqiReportMsg:
    report: CqiReport

    def fields(self):
        r = self.report
        return (("user", r.user), ("cqi", r.cqi), ("subframe", r.subframe), ("slot", r.slot))


def format_message(msg) -> str:
    return " ".join(f"{k}={v}" for k, v in msg.fields())


def on_subframe_indication(slot: int, subframe: int, latency: int) -> SchedTriggerReq | None:
    """Slot 1 of each subframe triggers scheduling of ``subframe + latency``."""
    if slot == 1:
        return SchedTriggerReq(target_subframe=subframe + latency)
    return None


# -- queues --------------------------------------------------------------


@dataclass(frozen=True)
class PacketBurst:
    packets: tuple[int, ...] = ()
    padding: int = 0

    @property
    def payload_bits(self) -> int:
        return sum(self.packets)

    def __bool__(self):
        return bool(self.packets)


class PacketQueue:
    """FIFO of whole packets (sizes in bits), unbounded."""

    def __init__(self, packets=()):
        self._q = deque(packets)

    def __len__(self):
        return len(self._q)

    @property
    def occupancy_bits(self) -> int:
        return sum(self._q)

    def push(self, bits: int) -> None:
        self._q.append(bits)

    def dequeue(self, tb_size: int) -> PacketBurst:
        if tb_size <= 0 or not self._q:
            return PacketBurst()
        taken = []
        room = tb_size
        while self._q and self._q[0] <= room:
            bits = self._q.popleft()
            taken.append(bits)
            room -= bits
        if not taken:
            return PacketBurst()
        return PacketBurst(tuple(taken), padding=room)


class FullBufferQueue:
    """Source that always fills the whole transport block."""

    occupancy_bits = float("inf")

    def __len__(self):
        return 1

    def push(self, bits: int) -> None:
        pass

    def dequeue(self, tb_size: int) -> PacketBurst:
        if tb_size <= 0:
            return PacketBurst()
        return PacketBurst((tb_size,), 0)


def dequeue_for_slot(user: Hashable, tb_size: int, queues: dict) -> PacketBurst:
    return queues[user].dequeue(tb_size)


# -- eNB MAC ---------------------------------------------------------------


@dataclass
class EnbMac:
    """Base-station MAC: relays between PHY and the scheduler.

    ``log`` receives ``(message_name, message)`` for every SAP crossing.
    """

    cfg: FrameConfig
    scheduler: RoundRobinScheduler
    log: Callable[[str, object], None] = lambda name, msg: None
    queues: dict = field(default_factory=dict)
    allocations: dict = field(default_factory=dict)

    def attach(self, user, queue) -> None:
        self.scheduler.attach(user)
        self.queues[user] = queue

    def subframe_indication(self, ind: SubframeIndication, absolute_subframe: int) -> ResourceAllocationMsg | None:
        self.log("SubframeIndication", ind)
        trigger = on_subframe_indication(ind.slot, absolute_subframe, self.cfg.l1l2_control_latency)
        if trigger is None:
            return None
        self.log("SchedTriggerReq", trigger)
        alloc = self.scheduler.schedule(trigger.target_subframe)
        self.log("SchedConfigInd", SchedConfigInd(alloc))
        self.allocations[alloc.subframe] = alloc
        msg = ResourceAllocationMsg(alloc)
        self.log("ResourceAllocationMsg", msg)
        return msg

    def allocation_for(self, subframe: int) -> AllocationMap:
        """Map governing ``subframe``; empty before the first decision lands."""
        alloc = self.allocations.pop(subframe, None)
        return alloc if alloc is not None else empty_allocation(subframe, self.cfg)

    def relay_cqi(self, report: CqiReport) -> None:
        self.log("CqiReport", CqiReportMsg(report))
        self.scheduler.update_cqi(report)

    def dequeue_for_slot(self, user, tb_size: int) -> PacketBurst:
        return dequeue_for_slot(user, tb_size, self.queues)
