"""Scenario description: everything a run needs besides the clock."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..channel.pool import ClusterStats
from ..channel.propagation import LOS_PATHLOSS, NLOS_PATHLOSS, LinkState, LinkStateModel, PathlossParams
from ..config import FrameConfig
from .mobility import MobilityState, time_to_reach


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelSettings:
    los: PathlossParams = LOS_PATHLOSS
    nlos: PathlossParams = NLOS_PATHLOSS
    link_state: LinkStateModel = field(default_factory=LinkStateModel)
    update_period: float = 0.1
    pool_size: int = 100
    pool_file: Optional[str] = None
    tx_antennas: int = 64
    rx_antennas: int = 16
    clusters: ClusterStats = field(default_factory=ClusterStats)
    beamforming_iterations: int = 500

    def __post_init__(self):
        if self.update_period <= 0:
            raise ScenarioError("channel.update_period must be > 0")
        if self.pool_size < 1:
            raise ScenarioError("channel.pool_size must be >= 1")
        if self.tx_antennas < 1 or self.rx_antennas < 1:
            raise ScenarioError("antenna counts must be >= 1")


@dataclass(frozen=True)
class RadioSettings:
    tx_power_dbm: float = 30.0
    ue_tx_power_dbm: float = 23.0
    noise_figure_db: float = 5.0
    temperature_k: float = 290.0
    bler_target: float = 0.1
    error_model: bool = True
    miesm_table: Optional[str] = None

    def __post_init__(self):
        if not 0 < self.bler_target < 1:
            raise ScenarioError("radio.bler_target must be in (0, 1)")
        if self.temperature_k <= 0:
            raise ScenarioError("radio.temperature_k must be > 0")


@dataclass(frozen=True)
class UserSpec:
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    serving: Optional[int] = None  # base-station index; nearest if None

    @property
    def mobility(self) -> MobilityState:
        return MobilityState(self.position, self.velocity)


@dataclass(frozen=True)
class Topology:
    base_stations: tuple[tuple[float, float], ...]
    users: tuple[UserSpec, ...] = ()

    def __post_init__(self):
        if not self.base_stations:
            raise ScenarioError("topology needs at least one base station")
        for i, u in enumerate(self.users):
            if u.serving is not None and not 0 <= u.serving < len(self.base_stations):
                raise ScenarioError(f"user {i}: serving index {u.serving} out of range")


TRAFFIC_KINDS = ("full_buffer", "cbr", "none")


@dataclass(frozen=True)
class TrafficSettings:
    dl: str = "full_buffer"
    ul: str = "none"
    cbr_rate_bps: float = 100e6
    packet_bits: int = 12000

    def __post_init__(self):
        for name in ("dl", "ul"):
            if getattr(self, name) not in TRAFFIC_KINDS:
                raise ScenarioError(f"traffic.{name} must be one of {TRAFFIC_KINDS}")
        if self.cbr_rate_bps <= 0 or self.packet_bits <= 0:
            raise ScenarioError("traffic rate and packet size must be > 0")


@dataclass(frozen=True)
class RunSettings:
    seed: int = 1
    duration: Optional[float] = None
    max_distance: Optional[float] = 200.0
    link_state: Optional[LinkState] = None  # pin LOS/NLOS, bypassing the draw
    output_dir: str = "out"
    channel_grid: bool = False

    def __post_init__(self):
        if self.duration is not None and self.duration <= 0:
            raise ScenarioError("run.duration must be > 0")
        if self.duration is None and self.max_distance is None:
            raise ScenarioError("run needs either duration or max_distance")


@dataclass(frozen=True)
class Scenario:
    frame: FrameConfig = field(default_factory=FrameConfig)
    channel: ChannelSettings = field(default_factory=ChannelSettings)
    radio: RadioSettings = field(default_factory=RadioSettings)
    topology: Topology = field(default_factory=lambda: Topology(((0.0, 0.0),), (UserSpec((40.0, 0.0), (20.0, 0.0)),)))
    traffic: TrafficSettings = field(default_factory=TrafficSettings)
    run: RunSettings = field(default_factory=RunSettings)

    def serving_index(self, user: UserSpec) -> int:
        if user.serving is not None:
            return user.serving
        p = user.position
        d = [(p[0] - b[0]) ** 2 + (p[1] - b[1]) ** 2 for b in self.topology.base_stations]
        return min(range(len(d)), key=d.__getitem__)

    def resolve_duration(self) -> float:
        """Explicit duration, else the time the last user reaches ``max_distance``."""
        if self.run.duration is not None:
            return self.run.duration
        times = []
        for user in self.topology.users:
            anchor = self.topology.base_stations[self.serving_index(user)]
            t = time_to_reach(user.mobility, anchor, self.run.max_distance)
            if t is not None:
                times.append(t)
        if not times or max(times) <= 0:
            raise ScenarioError("no user ever reaches run.max_distance; set run.duration")
        return max(times)
