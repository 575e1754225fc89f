"""Round-robin MAC scheduler with AMC."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

from ..config import FrameConfig
from .amc import AmcTable, cqi_to_tb_size
from .tdd import Direction, SlotKind, assign_tdd_slots, switching_slots

INITIAL_CQI = 1


@dataclass(frozen=True)
class SlotAssignment:
    slot: int
    kind: SlotKind
    direction: Direction
    user: Hashable | None = None
    mcs: int = 0
    tb_size: int = 0

    def __post_init__(self):
        if self.kind is SlotKind.CONTROL and self.user is not None:
            raise ValueError("control slots are not allocated to a user")


@dataclass(frozen=True)
class AllocationMap:
    subframe: int
    assignments: tuple[SlotAssignment, ...]

    def data_slots(self, direction: Direction | None = None):
        return [
            a
            for a in self.assignments
            if a.kind is SlotKind.DATA and (direction is None or a.direction is direction)
        ]

    def encode(self) -> str:
        """Compact form for the message log: ``DL:c|UL:c|DL:d:ue0:7:158739|...``."""
        parts = []
        for a in self.assignments:
            if a.kind is SlotKind.CONTROL:
                parts.append(f"{a.direction.value}:c")
            elif a.user is None:
                parts.append(f"{a.direction.value}:d:-")
            else:
                parts.append(f"{a.direction.value}:d:{a.user}:{a.mcs}:{a.tb_size}")
        return "|".join(parts)


@dataclass(frozen=True)
class CqiReport:
    user: Hashable
    cqi: int
    subframe: int
    slot: int

    def __post_init__(self):
        if not 0 <= self.cqi <= 15:
            raise ValueError(f"CQI out of range: {self.cqi}")


def empty_allocation(subframe: int, cfg: FrameConfig) -> AllocationMap:
    layout = assign_tdd_slots(cfg.tdd_pattern, cfg.slots_per_subframe)
    return AllocationMap(subframe, tuple(SlotAssignment(i, k, d) for i, (k, d) in enumerate(layout)))


def _next_user(users, start, eligible):
    n = len(users)
    for step in range(n):
        idx = (start + step) % n
        if users[idx] in eligible:
            return idx
    return None


def schedule_round_robin(
    users: Sequence[Hashable],
    cursors: tuple[int, int],
    tdd_assignment,
    cqi_state: dict,
    amc: AmcTable,
    cfg: FrameConfig,
    subframe: int = 0,
) -> tuple[AllocationMap, tuple[int, int]]:
    """Allocate one subframe.

    ``cursors`` are the positions in ``users`` of the next user to serve for
    DL and UL. Users whose CQI is 0 are skipped while anyone else has a
    usable CQI; if nobody does, every user is probed at the lowest CQI so
    that fresh measurements can arrive. Returns the map and updated cursors.
    """
    switch = switching_slots(tdd_assignment)
    cursor = {Direction.DL: cursors[0], Direction.UL: cursors[1]}
    cqi_of = {u: cqi_state.get(u, INITIAL_CQI) for u in users}
    eligible = {u for u in users if cqi_of[u] >= 1}
    probe = not eligible
    if probe:
        eligible = set(users)

    out = []
    for slot, (kind, direction) in enumerate(tdd_assignment):
        if kind is SlotKind.CONTROL or not users:
            out.append(SlotAssignment(slot, kind, direction))
            continue
        idx = _next_user(users, cursor[direction], eligible)
        user = users[idx]
        cursor[direction] = (idx + 1) % len(users)
        cqi = INITIAL_CQI if probe else cqi_of[user]
        guard = cfg.guard_symbols if switch[slot] else 0
        out.append(
            SlotAssignment(
                slot,
                kind,
                direction,
                user=user,
                mcs=amc.cqi_to_mcs(cqi),
                tb_size=cqi_to_tb_size(cqi, amc, cfg, guard),
            )
        )
    return AllocationMap(subframe, tuple(out)), (cursor[Direction.DL], cursor[Direction.UL])


@dataclass
class RoundRobinScheduler:
    """Stateful wrapper: attached users, latest CQI per user and the cursors."""

    cfg: FrameConfig
    amc: AmcTable
    users: list = field(default_factory=list)
    cqi: dict = field(default_factory=dict)
    cqi_stamp: dict = field(default_factory=dict)
    cursors: tuple[int, int] = (0, 0)

    def __post_init__(self):
        self.layout = assign_tdd_slots(self.cfg.tdd_pattern, self.cfg.slots_per_subframe)

    def attach(self, user) -> None:
        if user in self.users:
            raise ValueError(f"user {user!r} already attached")
        self.users.append(user)
        self.cqi[user] = INITIAL_CQI

    def detach(self, user) -> None:
        idx = self.users.index(user)
        self.users.pop(idx)
        self.cqi.pop(user, None)
        self.cqi_stamp.pop(user, None)
        n = len(self.users)
        self.cursors = tuple(0 if n == 0 else (c - (c > idx)) % n for c in self.cursors)

    def update_cqi(self, report: CqiReport) -> None:
        """Latest-wins by measurement time; unknown users raise ``KeyError``."""
        if report.user not in self.users:
            raise KeyError(f"CQI report for unattached user {report.user!r}")
        stamp = (report.subframe, report.slot)
        if report.user in self.cqi_stamp and stamp < self.cqi_stamp[report.user]:
            return
        self.cqi[report.user] = report.cqi
        self.cqi_stamp[report.user] = stamp

    def schedule(self, subframe: int) -> AllocationMap:
        alloc, self.cursors = schedule_round_robin(
            self.users, self.cursors, self.layout, self.cqi, self.amc, self.cfg, subframe
        )
        return alloc
