"""Scenario execution: slot clock, channel evolution, PHY and MAC per slot."""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ..channel.beamforming import BeamformingPair, power_iteration_beamforming
from ..channel.fading import (
    ChannelRealization,
    assemble_channel,
    beam_projections,
    beamformed_gains,
    doppler_shift,
    update_large_scale,
)
from ..channel.pool import generate_realization_pool, load_pool
from ..channel.propagation import LinkState, draw_shadowing, pathloss_db, select_link_state
from ..config import system_bandwidth
from ..mac.amc import load_amc_table
from ..mac.sap import EnbMac, FullBufferQueue, PacketQueue, SubframeIndication, format_message
from ..mac.scheduler import CqiReport, RoundRobinScheduler
from ..mac.tdd import Direction, SlotKind, assign_tdd_slots
from ..phy.cqi import build_cqi_table, cqi_from_subbands
from ..phy.error_model import DecodeOutcome, bler_for_sinr, decide_decode, default_miesm_table, load_miesm_table
from ..phy.sinr import LinkTerms, compute_sinr, dbm_to_watt, thermal_noise_psd
from . import traces as tr
from .engine import EventKind, EventLoop
from .mobility import advance_mobility, distance
from .scenario import Scenario

# independent random streams, one per concern
STREAMS = ("link_state", "shadowing", "pool_draw", "decode", "pool", "traffic")


def make_streams(seed: int) -> dict[str, np.random.Generator]:
    return {
        name: np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        for i, name in enumerate(STREAMS)
    }


def pool_seed(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(STREAMS.index("pool"),))


@dataclass
class Link:
    """State of one base-station/user pair (both directions share it)."""

    bs: int
    ue: int
    realization: ChannelRealization
    beams: BeamformingPair
    projections: np.ndarray

    @property
    def name(self) -> str:
        return f"bs{self.bs}-ue{self.ue}"


@dataclass
class RunResult:
    slot_traces: list = field(default_factory=list)
    messages: list = field(default_factory=list)
    updates: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    event_counts: dict = field(default_factory=dict)
    duration: float = 0.0
    seed: int = 0
    miesm_digest: str = ""

    def write(self, out_dir) -> dict[str, str]:
        tr.ensure_dir(out_dir)
        paths = {
            "slots": os.path.join(out_dir, tr.SLOT_FILE),
            "messages": os.path.join(out_dir, tr.MESSAGE_FILE),
            "updates": os.path.join(out_dir, tr.UPDATE_FILE),
            "info": os.path.join(out_dir, tr.RUN_INFO_FILE),
        }
        tr.write_slot_traces(paths["slots"], self.slot_traces)
        tr.write_csv(paths["messages"], tr.MESSAGE_FIELDS, self.messages)
        tr.write_csv(paths["updates"], tr.UPDATE_FIELDS, self.updates)
        info = [("seed", self.seed), ("duration_s", repr(self.duration)), ("miesm_sha256", self.miesm_digest)]
        tr.write_csv(paths["info"], tr.RUN_INFO_FIELDS, info)
        if self.grid:
            paths["grid"] = os.path.join(out_dir, tr.GRID_FILE)
            tr.write_csv(paths["grid"], tr.GRID_FIELDS, self.grid)
        return paths


class Simulation:
    def __init__(self, scenario: Scenario, duration: float | None = None):
        self.sc = scenario
        self.cfg = scenario.frame
        self.duration = duration if duration is not None else scenario.resolve_duration()
        self.duration_ns = int(round(self.duration * 1e9))
        self.rng = make_streams(scenario.run.seed)
        self.loop = EventLoop()
        self.result = RunResult(duration=self.duration, seed=scenario.run.seed)

        ch = scenario.channel
        if ch.pool_file:
            self.pool = load_pool(ch.pool_file)
        else:
            self.pool = generate_realization_pool(pool_seed(scenario.run.seed), ch.pool_size, ch.clusters, ch.tx_antennas, ch.rx_antennas)

        self.amc = load_amc_table()
        self.miesm = load_miesm_table(scenario.radio.miesm_table) if scenario.radio.miesm_table else default_miesm_table()
        self.result.miesm_digest = self.miesm.digest
        self.cqi_table = build_cqi_table(self.amc, self.miesm, self.cfg, scenario.radio.bler_target)

        self.layout = assign_tdd_slots(self.cfg.tdd_pattern, self.cfg.slots_per_subframe)
        n_sb = self.cfg.num_subbands
        bw = system_bandwidth(self.cfg)
        # sub-band centres as offsets from the carrier
        self.freqs = (np.arange(n_sb) + 0.5) * self.cfg.subband_width - bw / 2
        self.noise_psd = thermal_noise_psd(scenario.radio.temperature_k)

        self.bs_pos = [np.asarray(p, dtype=float) for p in scenario.topology.base_stations]
        self.users = list(scenario.topology.users)
        self.serving = [scenario.serving_index(u) for u in self.users]
        self.pending_cqi: dict[int, list[CqiReport]] = {i: [] for i in range(len(self.users))}

        self.macs = []
        for b in range(len(self.bs_pos)):
            sched = RoundRobinScheduler(self.cfg, self.amc)
            mac = EnbMac(self.cfg, sched, log=self._logger(f"enb{b}"))
            self.macs.append(mac)
        self.ul_queues = {}
        for u, spec in enumerate(self.users):
            self.macs[self.serving[u]].attach(u, self._make_queue(scenario.traffic.dl))
            self.ul_queues[u] = self._make_queue(scenario.traffic.ul)
        self.current_alloc = {}

        self.links: dict[tuple[int, int], Link] = {}
        for b in range(len(self.bs_pos)):
            for u in range(len(self.users)):
                self.links[(b, u)] = self._init_link(b, u)

    # -- helpers -----------------------------------------------------------

    def _logger(self, node):
        def log(name, msg):
            self.result.messages.append((f"{self.loop.now_ns / 1e9:.9f}", node, name, format_message(msg)))

        return log

    def _make_queue(self, kind):
        if kind == "full_buffer":
            return FullBufferQueue()
        return PacketQueue()

    def _position(self, u: int, t: float):
        return advance_mobility(self.users[u].mobility, t)

    def _distance(self, b: int, u: int, t: float) -> float:
        return max(1e-3, distance(self.bs_pos[b], self._position(u, t)))

    def _doppler(self, u: int) -> float:
        return doppler_shift(self.users[u].mobility.speed, self.cfg.center_freq)

    def _pick_state(self, b, u, t) -> LinkState:
        pinned = self.sc.run.link_state
        draw = float(self.rng["link_state"].uniform())  # drawn even when pinned: keeps streams aligned
        if pinned is not None:
            return pinned
        return select_link_state(self._distance(b, u, t), self.sc.channel.link_state, draw)

    def _params(self, state: LinkState):
        return self.sc.channel.los if state is LinkState.LOS else self.sc.channel.nlos

    def _beams(self, realization, u, t) -> tuple[BeamformingPair, np.ndarray]:
        H = assemble_channel(realization, t, 0.0, self._doppler(u))
        beams = power_iteration_beamforming(H, self.sc.channel.beamforming_iterations)
        return beams, beam_projections(realization.spatial, beams.rx_weights, beams.tx_weights)

    def _init_link(self, b, u) -> Link:
        state = self._pick_state(b, u, 0.0)
        shadow = draw_shadowing(self._params(state), self.rng["shadowing"]) if state is not LinkState.OUTAGE else 0.0
        entry = self.pool[int(self.rng["pool_draw"].integers(len(self.pool)))]
        real = ChannelRealization(state, shadow, entry, last_large_scale_update=0.0, epoch=0)
        beams, proj = self._beams(real, u, 0.0)
        link = Link(b, u, real, beams, proj)
        self.result.updates.append((0.0, link.name, -1, entry.realization_id, 0, state.value, shadow))
        return link

    def _pathloss(self, link: Link, t: float) -> float:
        real = link.realization
        if real.link_state is LinkState.OUTAGE:
            return math.inf
        return pathloss_db(self._distance(link.bs, link.ue, t), self._params(real.link_state), real.shadowing_db)

    # -- events ------------------------------------------------------------

    def run(self) -> RunResult:
        tti_ns = self.cfg.tti_ns
        period_ns = int(round(self.sc.channel.update_period * 1e9))
        for k in range(1, self.duration_ns // period_ns + 1):
            self.loop.schedule(k * period_ns, EventKind.LARGE_SCALE_UPDATE, self._on_large_scale)
        self._schedule_traffic()
        if tti_ns <= self.duration_ns:
            self._schedule_slot(0)
        self.loop.run(self.duration_ns)
        self.result.event_counts = {k.value: v for k, v in self.loop.counts.items()}
        return self.result

    def _schedule_slot(self, g: int) -> None:
        t_ns = g * self.cfg.tti_ns
        S, F = self.cfg.slots_per_subframe, self.cfg.subframes_per_frame
        if g % S == 0:
            if (g // S) % F == 0:
                self.loop.schedule(t_ns, EventKind.FRAME_START, lambda ev: None, g // (S * F))
            self.loop.schedule(t_ns, EventKind.SUBFRAME_START, lambda ev: None, g // S)
        self.loop.schedule(t_ns, EventKind.SLOT_START, self._on_slot, g)

    def _schedule_traffic(self) -> None:
        tf = self.sc.traffic
        if tf.dl != "cbr":
            return
        interval_ns = max(1, int(round(tf.packet_bits / tf.cbr_rate_bps * 1e9)))
        for u in range(len(self.users)):
            offset = int(self.rng["traffic"].integers(interval_ns))
            self.loop.schedule(offset, EventKind.TRAFFIC_ARRIVAL, self._on_arrival, (u, interval_ns))

    def _on_arrival(self, ev) -> None:
        u, interval_ns = ev.payload
        self.macs[self.serving[u]].queues[u].push(self.sc.traffic.packet_bits)
        nxt = ev.time_ns + interval_ns
        if nxt <= self.duration_ns:
            self.loop.schedule(nxt, EventKind.TRAFFIC_ARRIVAL, self._on_arrival, ev.payload)

    def _on_large_scale(self, ev) -> None:
        t = ev.time_ns / 1e9
        period = self.sc.channel.update_period
        for link in self.links.values():
            old = link.realization
            state = self._pick_state(link.bs, link.ue, t)
            shadow_draw = draw_shadowing(self._params(state), self.rng["shadowing"])
            shadow = old.shadowing_db
            if state is not old.link_state:
                shadow = shadow_draw if state is not LinkState.OUTAGE else 0.0
            real = update_large_scale(old, t, period, self.pool, self.rng["pool_draw"])
            real.link_state = state
            real.shadowing_db = shadow
            link.realization = real
            link.beams, link.projections = self._beams(real, link.ue, t)
            self.result.updates.append((t, link.name, old.realization_id, real.realization_id, real.epoch, state.value, shadow))

    def _on_slot(self, ev) -> None:
        g = ev.payload
        cfg = self.cfg
        S, F = cfg.slots_per_subframe, cfg.subframes_per_frame
        s = g % S
        sf_abs = g // S
        frame, sf = divmod(sf_abs, F)
        t = ev.time_ns / 1e9

        for b, mac in enumerate(self.macs):
            mac.subframe_indication(SubframeIndication(frame, sf, s + 1), sf_abs)
            if s == 0:
                self.current_alloc[b] = mac.allocation_for(sf_abs)

        kind, direction = self.layout[s]
        if kind is SlotKind.CONTROL and direction is Direction.UL:
            for u, reports in self.pending_cqi.items():
                for rep in reports:
                    self.macs[self.serving[u]].relay_cqi(rep)
                reports.clear()
        elif kind is SlotKind.DATA:
            self._data_slot(g, frame, sf, s, t, direction)

        if self.sc.run.channel_grid:
            self._grid_rows(g, t)

        nxt = g + 1
        if (nxt + 1) * cfg.tti_ns <= self.duration_ns:
            self._schedule_slot(nxt)

    def _grid_rows(self, g, t) -> None:
        for u in range(len(self.users)):
            link = self.links[(self.serving[u], u)]
            gains = beamformed_gains(link.realization.spatial, link.projections, t, self.freqs, self._doppler(u))
            gains_db = 10 * np.log10(np.maximum(gains, 1e-300))
            for k, v in enumerate(gains_db):
                self.result.grid.append((f"{t:.9f}", g, link.name, k, float(v), link.realization.realization_id, link.realization.epoch))

    def _data_slot(self, g, frame, sf, s, t, direction) -> None:
        n_sb = self.cfg.num_subbands
        radio = self.sc.radio
        bs_power = dbm_to_watt(radio.tx_power_dbm) / n_sb
        ue_power = dbm_to_watt(radio.ue_tx_power_dbm) / n_sb

        # who transmits in this slot
        active = []
        for b in range(len(self.bs_pos)):
            a = self.current_alloc[b].assignments[s]
            if a.user is None or a.tb_size <= 0:
                continue
            if direction is Direction.DL:
                burst = self.macs[b].dequeue_for_slot(a.user, a.tb_size)
            else:
                burst = self.ul_queues[a.user].dequeue(a.tb_size)
            if burst:
                active.append((b, a, burst))

        for b, a, burst in active:
            u = a.user
            link = self.links[(b, u)]
            fd = self._doppler(u)
            gain = beamformed_gains(link.realization.spatial, link.projections, t, self.freqs, fd)
            interferers = []
            for b2, a2, _ in active:
                if b2 == b:
                    continue
                if direction is Direction.DL:
                    # BS b2 beaming at its own user, heard by u through u's serving beam
                    cross = self.links[(b2, u)]
                    tx_w = self.links[(b2, a2.user)].beams.tx_weights
                    rx_w = link.beams.rx_weights
                    power = bs_power
                    ue_of_cross = u
                else:
                    # UE a2.user transmitting to b2, heard by b through b's beam to u
                    cross = self.links[(b, a2.user)]
                    tx_w = link.beams.tx_weights
                    rx_w = self.links[(b2, a2.user)].beams.rx_weights
                    power = ue_power
                    ue_of_cross = a2.user
                proj = beam_projections(cross.realization.spatial, rx_w, tx_w)
                g2 = beamformed_gains(cross.realization.spatial, proj, t, self.freqs, self._doppler(ue_of_cross))
                interferers.append(LinkTerms(power, self._pathloss(cross, t), g2))

            pl = self._pathloss(link, t)
            power = bs_power if direction is Direction.DL else ue_power
            rec = compute_sinr(
                LinkTerms(power, pl, gain),
                interferers,
                self.cfg.subband_width,
                self.noise_psd,
                radio.noise_figure_db,
                slot=g,
                link=link.name,
            )
            if radio.error_model:
                bler = bler_for_sinr(rec.per_subband, a.mcs, a.tb_size, self.miesm)
            else:
                bler = 0.0
            outcome = decide_decode(bler, float(self.rng["decode"].uniform()))
            delivered = burst.payload_bits if outcome is DecodeOutcome.DECODED else 0
            cqi = cqi_from_subbands(rec.per_subband, self.cqi_table, self.amc, self.miesm)
            if direction is Direction.DL:
                self.pending_cqi[u].append(CqiReport(u, cqi, g // self.cfg.slots_per_subframe, s))

            with np.errstate(divide="ignore"):
                sinr_db = 10 * np.log10(rec.per_subband)
                wide_db = 10 * math.log10(rec.wideband) if rec.wideband > 0 else -math.inf
                bf_db = 10 * math.log10(float(np.mean(gain))) if np.mean(gain) > 0 else -math.inf
            self.result.slot_traces.append(
                tr.SlotTrace(
                    time=t,
                    global_slot=g,
                    frame=frame,
                    subframe=sf,
                    slot=s,
                    link=link.name,
                    direction=direction.value,
                    kind=SlotKind.DATA.value,
                    distance=self._distance(b, u, t),
                    link_state=link.realization.link_state.value,
                    pathloss_db=pl,
                    bf_gain_db=bf_db,
                    sinr_subbands_db=tuple(float(x) for x in sinr_db),
                    sinr_db=wide_db,
                    cqi=cqi,
                    mcs=a.mcs,
                    tb_size=a.tb_size,
                    tb_bler=bler,
                    outcome=outcome.value,
                    delivered_bits=delivered,
                    realization_id=link.realization.realization_id,
                    epoch=link.realization.epoch,
                )
            )


def run(scenario: Scenario, duration: float | None = None) -> RunResult:
    """Run a scenario; deterministic for a given ``scenario.run.seed``."""
    return Simulation(scenario, duration).run()


def file_digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
