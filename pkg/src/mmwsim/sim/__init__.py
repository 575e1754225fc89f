from .engine import Event, EventKind, EventLoop
from .mobility import MobilityState, advance_mobility, distance
from .runner import RunResult, Simulation, run
from .scenario import (
    ChannelSettings,
    RadioSettings,
    RunSettings,
    Scenario,
    ScenarioError,
    Topology,
    TrafficSettings,
    UserSpec,
)
from .traces import (
    SlotTrace,
    average_sinr_vs_distance,
    read_slot_traces,
    summarize,
    throughput_vs_distance,
    throughput_vs_time,
)
