"""Trace records, CSV writers/readers and the reductions used for plots.

Files written per run (UTF-8, header row, rows in simulation order):

``slot_trace.csv``
    one row per data slot per transmitting link, columns :data:`SLOT_FIELDS`;
    ``sinr_subbands_db`` is a ``;``-separated list, ``slot`` is 0-based.
``sap_messages.csv``
    ``time,node,message,fields``; ``fields`` is ``key=value`` pairs in the
    order each message defines (SAP slot numbers count from 1).
``large_scale_updates.csv``
    one row per link per large-scale refresh.
``run_info.csv``
    ``key,value`` rows: seed, duration and the SHA-256 of the MIESM table.
``channel_grid.csv``
    optional; beamformed gain of every serving link per slot and sub-band.
"""

from __future__ import annotations

import csv
import math
import os
from collections import defaultdict
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

SLOT_FILE = "slot_trace.csv"
MESSAGE_FILE = "sap_messages.csv"
UPDATE_FILE = "large_scale_updates.csv"
GRID_FILE = "channel_grid.csv"
RUN_INFO_FILE = "run_info.csv"

MESSAGE_FIELDS = ("time", "node", "message", "fields")
UPDATE_FIELDS = ("time", "link", "old_realization", "new_realization", "epoch", "link_state", "shadowing_db")
RUN_INFO_FIELDS = ("key", "value")
GRID_FIELDS = ("time", "global_slot", "link", "subband", "gain_db", "realization_id", "epoch")


@dataclass(frozen=True)
class SlotTrace:
    time: float
    global_slot: int
    frame: int
    subframe: int
    slot: int
    link: str
    direction: str
    kind: str
    distance: float
    link_state: str
    pathloss_db: float
    bf_gain_db: float
    sinr_subbands_db: tuple
    sinr_db: float
    cqi: int
    mcs: int
    tb_size: int
    tb_bler: float
    outcome: str
    delivered_bits: int
    realization_id: int
    epoch: int


SLOT_FIELDS = tuple(f.name for f in fields(SlotTrace))
_INT_FIELDS = {"global_slot", "frame", "subframe", "slot", "cqi", "mcs", "tb_size", "delivered_bits", "realization_id", "epoch"}
_FLOAT_FIELDS = {"time", "distance", "pathloss_db", "bf_gain_db", "sinr_db", "tb_bler"}


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)  # shortest exact round-trip
    return str(x)


def slot_row(t: SlotTrace) -> list[str]:
    row = []
    for name, value in zip(SLOT_FIELDS, astuple(t)):
        if name == "time":
            row.append(f"{value:.9f}")
        elif name == "sinr_subbands_db":
            row.append(";".join(f"{v:.2f}" for v in value))
        else:
            row.append(_fmt(value))
    return row


def parse_slot_row(row: dict) -> SlotTrace:
    kwargs = {}
    for name in SLOT_FIELDS:
        v = row[name]
        if name in _INT_FIELDS:
            kwargs[name] = int(v)
        elif name in _FLOAT_FIELDS:
            kwargs[name] = float(v)
        elif name == "sinr_subbands_db":
            kwargs[name] = tuple(float(x) for x in v.split(";")) if v else ()
        else:
            kwargs[name] = v
    return SlotTrace(**kwargs)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def write_slot_traces(path, traces: Iterable[SlotTrace]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SLOT_FIELDS)
        for t in traces:
            w.writerow(slot_row(t))


def read_slot_traces(path) -> list[SlotTrace]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [parse_slot_row(r) for r in csv.DictReader(fh)]


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# -- reductions ----------------------------------------------------------


def _select(traces, direction, link):
    return [
        t
        for t in traces
        if (direction is None or t.direction == direction) and (link is None or t.link == link)
    ]


def _to_db(x: float) -> float:
    return 10 * math.log10(x) if x > 0 else -math.inf


def average_sinr_vs_distance(traces: Sequence[SlotTrace], bin_width: float, direction: str | None = "DL", link: str | None = None) -> list[tuple[float, float]]:
    """Mean wideband SINR per distance bin, averaged in linear units, in dB.

    Bins are ``[k w, (k+1) w)`` and labelled by their lower edge.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    sel = _select(traces, direction, link)
    if not sel:
        raise ValueError("no traces to average")
    acc = defaultdict(list)
    for t in sel:
        acc[math.floor(t.distance / bin_width)].append(10 ** (t.sinr_db / 10) if math.isfinite(t.sinr_db) else 0.0)
    return [(k * bin_width, _to_db(sum(v) / len(v))) for k, v in sorted(acc.items())]


def throughput_vs_time(traces: Sequence[SlotTrace], window: float, duration: float | None = None, direction: str | None = "DL", link: str | None = None) -> list[tuple[float, float]]:
    """Delivered bits per window divided by the window length (bit/s).

    Windows start at 0; ``duration`` fixes how many there are, otherwise the
    last trace time does.
    """
    if window <= 0:
        raise ValueError("window must be > 0")
    sel = _select(traces, direction, link)
    end = duration if duration is not None else (max((t.time for t in sel), default=0.0) + 1e-12)
    n = max(1, math.ceil(end / window - 1e-9))
    bits = [0] * n
    for t in sel:
        k = min(n - 1, int(t.time // window))
        bits[k] += t.delivered_bits
    return [(k * window, b / window) for k, b in enumerate(bits)]


def throughput_vs_distance(traces: Sequence[SlotTrace], window: float, bin_width: float, direction: str | None = "DL", link: str | None = None) -> list[tuple[float, float]]:
    """Windowed throughput, each window placed at its mean distance, then binned."""
    sel = _select(traces, direction, link)
    if not sel:
        raise ValueError("no traces")
    windows = throughput_vs_time(sel, window, direction=None)
    dist = defaultdict(list)
    for t in sel:
        dist[min(len(windows) - 1, int(t.time // window))].append(t.distance)
    acc = defaultdict(list)
    for k, (_, rate) in enumerate(windows):
        if dist[k]:
            acc[math.floor(sum(dist[k]) / len(dist[k]) / bin_width)].append(rate)
    return [(k * bin_width, sum(v) / len(v)) for k, v in sorted(acc.items())]


def summarize(traces: Sequence[SlotTrace], duration: float) -> dict:
    """Headline numbers over DL data slots."""
    dl = _select(traces, "DL", None)
    lin = [10 ** (t.sinr_db / 10) if math.isfinite(t.sinr_db) else 0.0 for t in dl]
    drops = sum(1 for t in dl if t.outcome == "dropped")
    return {
        "dl_slots": len(dl),
        "mean_sinr_db": _to_db(sum(lin) / len(lin)) if lin else float("nan"),
        "total_delivered_bits": sum(t.delivered_bits for t in dl),
        "throughput_bps": sum(t.delivered_bits for t in dl) / duration if duration > 0 else 0.0,
        "drop_rate": drops / len(dl) if dl else 0.0,
    }


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return str(path)
