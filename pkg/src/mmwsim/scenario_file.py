"""YAML scenario files.

Layout (``radio``, ``topology`` and ``run`` are required)::

    frame:      # CamelCase frame keys, e.g. TDDControlDataPattern: ccdddddd
    channel:    # los/nlos pathloss, link_state_model, update_period, pool, antennas, clusters
    radio:      # tx_power_dbm, noise_figure_db, ...
    topology:   # base_stations: [[x, y], ...]; users: [{position, velocity, serving}]
    traffic:    # dl / ul: full_buffer | cbr | none
    run:        # seed, duration or max_distance, link_state, output_dir, channel_grid

Every problem is reported as ``<source>:<line>: <dotted.key>: <message>``.
"""

from __future__ import annotations

import dataclasses
from typing import Any, Callable

import yaml

from .channel.pool import ClusterStats
from .channel.propagation import LinkState, LinkStateModel, PathlossParams
from .config import FILE_KEYS, ConfigError, FrameConfig
from .sim.scenario import (
    ChannelSettings,
    RadioSettings,
    RunSettings,
    Scenario,
    ScenarioError,
    Topology,
    TrafficSettings,
    UserSpec,
)

REQUIRED_SECTIONS = ("radio", "topology", "run")
SECTIONS = ("frame", "channel", "radio", "topology", "traffic", "run")


class ScenarioFileError(ValueError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(diagnostics))


class _Bad(Exception):
    pass


# -- value converters ---------------------------------------------------------


def _float(v):
    if isinstance(v, bool):
        raise _Bad(f"expected a number, got {v!r}")
    try:
        return float(v)
    except (TypeError, ValueError):
        raise _Bad(f"expected a number, got {v!r}") from None


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise _Bad(f"expected an integer, got {v!r}")
    return v


def _bool(v):
    if not isinstance(v, bool):
        raise _Bad(f"expected true/false, got {v!r}")
    return v


def _str(v):
    if not isinstance(v, str):
        raise _Bad(f"expected a string, got {v!r}")
    return v


def _optional(conv):
    return lambda v: None if v is None else conv(v)


def _point(v):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise _Bad(f"expected [x, y], got {v!r}")
    return (_float(v[0]), _float(v[1]))


def _link_state(v):
    if v is None:
        return None
    for s in (LinkState.LOS, LinkState.NLOS):
        if str(v).upper() == s.value.upper():
            return s
    raise _Bad(f"expected LOS, NLOS or null, got {v!r}")


def _frame_value(v):
    # YAML 1.1 reads "28e9" as a string
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            return v
    return v


_PATHLOSS = {"alpha": _float, "beta": _float, "sigma": _float}
_LINK_MODEL = {"los_decay": _float, "outage_decay": _float, "outage_offset": _float}
_CLUSTERS = {
    "min_clusters": _int,
    "max_clusters": _int,
    "min_subpaths": _int,
    "max_subpaths": _int,
    "cluster_power_decay": _float,
    "cluster_shadow_db": _float,
    "angular_spread_deg": _float,
    "cluster_delay_mean": _float,
    "subpath_delay_spread": _float,
}
_CHANNEL = {
    "update_period": _float,
    "pool_size": _int,
    "pool_file": _optional(_str),
    "tx_antennas": _int,
    "rx_antennas": _int,
    "beamforming_iterations": _int,
}
_CHANNEL_NESTED = {"los": _PATHLOSS, "nlos": _PATHLOSS, "link_state_model": _LINK_MODEL, "clusters": _CLUSTERS}
_RADIO = {
    "tx_power_dbm": _float,
    "ue_tx_power_dbm": _float,
    "noise_figure_db": _float,
    "temperature_k": _float,
    "bler_target": _float,
    "error_model": _bool,
    "miesm_table": _optional(_str),
}
_TRAFFIC = {"dl": _str, "ul": _str, "cbr_rate_bps": _float, "packet_bits": _int}
_RUN = {
    "seed": _int,
    "duration": _optional(_float),
    "max_distance": _optional(_float),
    "link_state": _link_state,
    "output_dir": _str,
    "channel_grid": _bool,
}
_USER = {"position": _point, "velocity": _point, "serving": _optional(_int)}


# -- line tracking --------------------------------------------------------------


def _line_index(node, prefix="", out=None) -> dict[str, int | str]:
    """Map dotted key paths (list items as indices) to 1-based line numbers."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}.{k.value}" if prefix else str(k.value)
            out[path] = k.start_mark.line + 1
            _line_index(v, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            path = f"{prefix}.{i}"
            out[path] = v.start_mark.line + 1
            _line_index(v, path, out)
    return out


class _Collector:
    def __init__(self, source: str, lines: dict):
        self.source = source
        self.lines = lines
        self.items: list[str] = []

    def add(self, path: str, msg: str) -> None:
        line = self.lines.get(path)
        probe = path
        while line is None and "." in probe:
            probe = probe.rsplit(".", 1)[0]
            line = self.lines.get(probe)
        if isinstance(line, str):
            where = f"{self.source} ({line})"
        else:
            where = f"{self.source}:{line}" if line is not None else self.source
        self.items.append(f"{where}: {path}: {msg}")


def _convert(section: dict, spec: dict[str, Callable], path: str, diag: _Collector, nested=()) -> dict:
    out = {}
    for key, value in section.items():
        kp = f"{path}.{key}"
        if key in nested:
            continue
        if key not in spec:
            diag.add(kp, "unknown key")
            continue
        try:
            out[key] = spec[key](value)
        except _Bad as exc:
            diag.add(kp, str(exc))
    return out


def _mapping(value, path, diag) -> dict | None:
    if value is None:
        return {}
    if not isinstance(value, dict):
        diag.add(path, f"expected a mapping, got {type(value).__name__}")
        return None
    return value


def _build(cls, kwargs, path, diag):
    try:
        return cls(**kwargs)
    except (ScenarioError, ValueError, TypeError) as exc:
        diag.add(path, str(exc))
        return None


# -- build ------------------------------------------------------------------------


def scenario_from_data(data: Any, source: str = "<scenario>", lines: dict[str, int] | None = None) -> Scenario:
    """Validate a parsed mapping and build a :class:`Scenario`; all problems are collected."""
    diag = _Collector(source, lines or {})
    if not isinstance(data, dict):
        raise ScenarioFileError([f"{source}: top level must be a mapping of sections"])
    for key in data:
        if key not in SECTIONS:
            diag.add(str(key), "unknown section")
    for key in REQUIRED_SECTIONS:
        if key not in data:
            diag.add(key, "missing required section")

    parts: dict[str, Any] = {}

    frame = _mapping(data.get("frame"), "frame", diag)
    if frame is not None:
        try:
            parts["frame"] = FrameConfig.from_mapping({k: _frame_value(v) for k, v in frame.items()})
        except ConfigError as exc:
            for key, msg in exc.problems:
                diag.add(f"frame.{key}", msg)
        except TypeError as exc:
            diag.add("frame", str(exc))

    channel = _mapping(data.get("channel"), "channel", diag)
    if channel is not None:
        kwargs = _convert(channel, _CHANNEL, "channel", diag, nested=_CHANNEL_NESTED)
        for key, spec in _CHANNEL_NESTED.items():
            if key not in channel:
                continue
            sub = _mapping(channel[key], f"channel.{key}", diag)
            if sub is None:
                continue
            sub_kwargs = _convert(sub, spec, f"channel.{key}", diag)
            cls = {"los": PathlossParams, "nlos": PathlossParams, "link_state_model": LinkStateModel, "clusters": ClusterStats}[key]
            defaults = dataclasses.asdict(_DEFAULT_CHANNEL_PARTS[key])
            built = _build(cls, {**defaults, **sub_kwargs}, f"channel.{key}", diag)
            if built is not None:
                kwargs["link_state" if key == "link_state_model" else key] = built
        built = _build(ChannelSettings, kwargs, "channel", diag)
        if built is not None:
            parts["channel"] = built

    for name, spec, cls in (("radio", _RADIO, RadioSettings), ("traffic", _TRAFFIC, TrafficSettings), ("run", _RUN, RunSettings)):
        section = _mapping(data.get(name), name, diag)
        if section is None:
            continue
        built = _build(cls, _convert(section, spec, name, diag), name, diag)
        if built is not None:
            parts[name] = built

    topo = _mapping(data.get("topology"), "topology", diag)
    if topo is not None and "topology" in data:
        for key in topo:
            if key not in ("base_stations", "users"):
                diag.add(f"topology.{key}", "unknown key")
        stations = []
        raw_bs = topo.get("base_stations")
        if not isinstance(raw_bs, list):
            diag.add("topology.base_stations", "expected a list of [x, y] positions")
        else:
            for i, p in enumerate(raw_bs):
                try:
                    stations.append(_point(p))
                except _Bad as exc:
                    diag.add(f"topology.base_stations.{i}", str(exc))
        users = []
        raw_users = topo.get("users", [])
        if not isinstance(raw_users, list):
            diag.add("topology.users", "expected a list of users")
            raw_users = []
        for i, u in enumerate(raw_users):
            up = f"topology.users.{i}"
            u = _mapping(u, up, diag)
            if u is None:
                continue
            if "position" not in u:
                diag.add(up, "missing position")
                continue
            built = _build(UserSpec, _convert(u, _USER, up, diag), up, diag)
            if built is not None:
                users.append(built)
        if isinstance(raw_bs, list):
            built = _build(Topology, {"base_stations": tuple(stations), "users": tuple(users)}, "topology", diag)
            if built is not None:
                parts["topology"] = built

    if not diag.items:
        try:
            scenario = Scenario(**parts)
            scenario.resolve_duration()
            return scenario
        except ScenarioError as exc:
            diag.add("run", str(exc))
    raise ScenarioFileError(diag.items)


_DEFAULT_CHANNEL_PARTS = {
    "los": ChannelSettings().los,
    "nlos": ChannelSettings().nlos,
    "link_state_model": ChannelSettings().link_state,
    "clusters": ChannelSettings().clusters,
}


def parse_overrides(overrides) -> list[tuple[str, Any]]:
    """``["run.seed=3", ...]`` -> ``[("run.seed", 3), ...]``; values are parsed as YAML scalars."""
    out = []
    for item in overrides or ():
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ScenarioFileError([f"--set {item!r}: expected dotted.key=value"])
        try:
            value = yaml.safe_load(raw) if raw.strip() else None
        except yaml.YAMLError:
            raise ScenarioFileError([f"--set {item!r}: value is not valid YAML"]) from None
        out.append((key, value))
    return out


def apply_overrides(data: dict, overrides) -> dict:
    """Set dotted keys on a parsed document, in order (so the last one wins)."""
    data = dict(data) if isinstance(data, dict) else {}
    for key, value in parse_overrides(overrides):
        parts = key.split(".")
        node = data
        for i, part in enumerate(parts[:-1]):
            nxt = node.get(part) if isinstance(node, dict) else None
            if isinstance(nxt, list) and parts[i + 1].isdigit():
                nxt = list(nxt)
            elif not isinstance(nxt, dict):
                nxt = {} if not parts[i + 1].isdigit() else []
            else:
                nxt = dict(nxt)
            _set(node, part, nxt, key)
            node = nxt
        _set(node, parts[-1], value, key)
    return data


def _set(node, part, value, key):
    if isinstance(node, list):
        idx = int(part)
        if idx >= len(node):
            raise ScenarioFileError([f"--set {key}: index {idx} out of range"])
        node[idx] = value
    else:
        node[part] = value


def load_document(text: str, source: str = "<scenario>") -> tuple[Any, dict[str, int]]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f":{mark.line + 1}" if mark is not None else ""
        raise ScenarioFileError([f"{source}{line}: YAML syntax error: {getattr(exc, 'problem', exc)}"]) from None
    return data, (_line_index(node) if node is not None else {})


def parse_scenario_text(text: str, source: str = "<scenario>", overrides=()) -> Scenario:
    data, lines = load_document(text, source)
    if overrides:
        if not isinstance(data, dict):
            data = {}
        data = apply_overrides(data, overrides)
        for key, _ in parse_overrides(overrides):
            lines = {k: v for k, v in lines.items() if not k.startswith(key + ".")}
            lines[key] = "--set"
    return scenario_from_data(data, source, lines)


def load_scenario(path, overrides=()) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioFileError([f"{path}: cannot read: {exc.strerror}"]) from None
    return parse_scenario_text(text, str(path), overrides)


# -- dump ---------------------------------------------------------------------------


def scenario_to_data(sc: Scenario) -> dict:
    """Plain mapping that :func:`scenario_from_data` turns back into an equal scenario."""
    ch = sc.channel
    return {
        "frame": sc.frame.to_mapping(),
        "channel": {
            "los": dataclasses.asdict(ch.los),
            "nlos": dataclasses.asdict(ch.nlos),
            "link_state_model": dataclasses.asdict(ch.link_state),
            "update_period": ch.update_period,
            "pool_size": ch.pool_size,
            "pool_file": ch.pool_file,
            "tx_antennas": ch.tx_antennas,
            "rx_antennas": ch.rx_antennas,
            "clusters": dataclasses.asdict(ch.clusters),
            "beamforming_iterations": ch.beamforming_iterations,
        },
        "radio": dataclasses.asdict(sc.radio),
        "topology": {
            "base_stations": [list(p) for p in sc.topology.base_stations],
            "users": [
                {"position": list(u.position), "velocity": list(u.velocity), "serving": u.serving}
                for u in sc.topology.users
            ],
        },
        "traffic": dataclasses.asdict(sc.traffic),
        "run": {
            **dataclasses.asdict(sc.run),
            "link_state": sc.run.link_state.value if sc.run.link_state is not None else None,
        },
    }


def dump_scenario(sc: Scenario) -> str:
    return yaml.safe_dump(scenario_to_data(sc), sort_keys=False, default_flow_style=False)


# keys accepted in the frame section, for documentation and error messages
FRAME_KEYS = tuple(FILE_KEYS)
