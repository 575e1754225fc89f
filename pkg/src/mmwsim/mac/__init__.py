from .amc import AmcEntry, AmcTable, cqi_to_tb_size, load_amc_table, tb_size_ladder
from .sap import (
    EnbMac,
    FullBufferQueue,
    PacketBurst,
    PacketQueue,
    ResourceAllocationMsg,
    SchedConfigInd,
    SchedTriggerReq,
    SubframeIndication,
    dequeue_for_slot,
    format_message,
    on_subframe_indication,
)
from .scheduler import (
    AllocationMap,
    CqiReport,
    RoundRobinScheduler,
    SlotAssignment,
    empty_allocation,
    schedule_round_robin,
)
from .tdd import Direction, SlotKind, assign_tdd_slots, switching_slots
