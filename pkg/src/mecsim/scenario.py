"""Declarative scenario files (YAML) with strict, line-anchored validation.

Every key that is not part of the schema is rejected, and every error
message names the line it refers to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .app import EnergyProfile, LatencyModel
from .dists import Distribution
from .epc import S1Delays
from .orchestrator import MecHost, StartLatencyModel
from .radio import BaseStation, Metric, MobilityTrace, PathLossModel

BUNDLED = ("paper-walk", "ping-pong", "round-trip")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<scenario>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass
class UeConfig:
    ue_id: int
    service_name: str
    trace: MobilityTrace


@dataclass
class Scenario:
    duration_s: float
    base_stations: list[BaseStation]
    mec_hosts: list[MecHost]
    ue: UeConfig
    seed: int = 0
    path_loss: PathLossModel = field(default_factory=PathLossModel)
    measurement_interval_s: float = 0.2
    rsrq_offset_db: float = 0.0
    metric: Metric = Metric.RSRP
    ttt_s: float = 0.0
    cooldown_s: float = 5.0
    s1_delays: S1Delays = field(default_factory=S1Delays)
    termination_grace_s: float = 0.0
    dns_propagation_s: float = 0.5
    start_latency: StartLatencyModel = field(default_factory=StartLatencyModel.calibrated)
    frame_interval_s: float = 1.0
    poll_interval_s: float = 1.0
    latency: LatencyModel = field(default_factory=LatencyModel.calibrated)
    energy: EnergyProfile = field(default_factory=EnergyProfile)

    def to_dict(self) -> dict[str, Any]:
        sl = self.start_latency
        lat = self.latency
        return {
            "seed": self.seed,
            "duration_s": self.duration_s,
            "base_stations": [
                {"cell_id": b.cell_id, "position": list(b.position), "tx_power_dbm": b.tx_power,
                 "ho_margin_db": b.ho_margin} for b in self.base_stations],
            "mec_hosts": [{"host_id": h.host_id, "colocated_cell": h.colocated_cell} for h in self.mec_hosts],
            "ue": {
                "ue_id": self.ue.ue_id,
                "service_name": self.ue.service_name,
                "waypoints": [{"t": t, "position": list(p)} for t, p in self.ue.trace.waypoints],
            },
            "radio": {
                "measurement_interval_s": self.measurement_interval_s,
                "rsrq_offset_db": self.rsrq_offset_db,
                "path_loss": {"pl0_db": self.path_loss.pl0_db, "exponent": self.path_loss.exponent,
                              "d0_m": self.path_loss.d0_m, "shadow_sigma_db": self.path_loss.shadow_sigma_db},
            },
            "handover": {"metric": self.metric.value, "ttt_s": self.ttt_s, "cooldown_s": self.cooldown_s},
            "epc": {
                "request_to_command_s": self.s1_delays.request_to_command,
                "command_to_path_switch_s": self.s1_delays.command_to_path_switch,
                "path_switch_to_end_marker_s": self.s1_delays.path_switch_to_end_marker,
            },
            "orchestrator": {
                "termination_grace_s": self.termination_grace_s,
                "dns_propagation_s": self.dns_propagation_s,
                "start_latency": {
                    "scheduler": sl.scheduler_delay.to_dict(),
                    "fabric": sl.fabric_delay.to_dict(),
                    "container": sl.container_start_delay.to_dict(),
                    "app_init": sl.app_init_delay.to_dict(),
                },
            },
            "app": {
                "frame_interval_s": self.frame_interval_s,
                "poll_interval_s": self.poll_interval_s,
                "latency": {
                    "uplink": lat.uplink_delay.to_dict(),
                    "processing": lat.processing_delay.to_dict(),
                    "downlink": lat.downlink_delay.to_dict(),
                    "clip_min_s": lat.clip_min,
                    "clip_max_s": lat.clip_max,
                },
                "energy": {"idle_w": self.energy.idle_w, "encode_w": self.energy.encode_w,
                           "offload_w": self.energy.offload_w},
            },
        }


def dump_scenario(scenario: Scenario) -> str:
    return yaml.safe_dump(scenario.to_dict(), sort_keys=False, default_flow_style=None)


# -- parsing ---------------------------------------------------------------

def _line_map(text: str) -> dict[tuple, int]:
    """Map each key path (and list index path) to its 1-based source line."""
    lines: dict[tuple, int] = {}

    def walk(node, path):
        lines.setdefault(path, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                sub = path + (k.value,)
                lines[sub] = k.start_mark.line + 1
                walk(v, sub)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, path + (i,))

    root = yaml.compose(text, Loader=yaml.SafeLoader)
    if root is not None:
        walk(root, ())
    return lines


class _Reader:
    def __init__(self, lines: dict[tuple, int], source: str):
        self.lines = lines
        self.source = source

    def error(self, path: tuple, message: str) -> ScenarioError:
        p = path
        while p and p not in self.lines:
            p = p[:-1]
        dotted = ".".join(str(x) for x in path) or "<root>"
        return ScenarioError(f"{dotted}: {message}", self.lines.get(p), self.source)

    def mapping(self, value, path, required=(), optional=()) -> dict:
        if not isinstance(value, dict):
            raise self.error(path, "expected a mapping")
        for key in value:
            if key not in required and key not in optional:
                raise self.error(path + (key,), "unknown key")
        for key in required:
            if key not in value:
                raise self.error(path, f"missing required key {key!r}")
        return value

    def number(self, value, path, *, minimum=None, strict=False, integer=False, allow_inf=False) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(path, f"expected a number, got {value!r}")
        if integer and not isinstance(value, int):
            raise self.error(path, "expected an integer")
        if not math.isfinite(value) and not (allow_inf and value == math.inf):
            raise self.error(path, "expected a finite number")
        if minimum is not None and (value <= minimum if strict else value < minimum):
            raise self.error(path, f"must be {'>' if strict else '>='} {minimum}")
        return int(value) if integer else float(value)

    def string(self, value, path) -> str:
        if not isinstance(value, str) or not value:
            raise self.error(path, "expected a non-empty string")
        return value

    def point(self, value, path) -> tuple[float, float]:
        if not isinstance(value, list) or len(value) != 2:
            raise self.error(path, "expected [x, y]")
        return (self.number(value[0], path + (0,)), self.number(value[1], path + (1,)))

    def seq(self, value, path) -> list:
        if not isinstance(value, list):
            raise self.error(path, "expected a list")
        return value

    def dist(self, value, path) -> Distribution:
        value = self.mapping(value, path, required=("kind",),
                             optional=("value", "low", "high", "mean", "sigma", "min", "max"))
        params = {k: self.number(v, path + (k,), minimum=0, allow_inf=k == "max")
                  for k, v in value.items() if k != "kind"}
        try:
            return Distribution(value["kind"], params)
        except ValueError as exc:
            raise self.error(path, str(exc)) from None


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        data = yaml.safe_load(text)
        lines = _line_map(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                            mark.line + 1 if mark else None, source) from None
    r = _Reader(lines, source)
    top = r.mapping(data if data is not None else {}, (),
                    required=("duration_s", "base_stations", "mec_hosts", "ue"),
                    optional=("seed", "radio", "handover", "epc", "orchestrator", "app"))
    sc: dict[str, Any] = {}
    if "seed" in top:
        seed = r.number(top["seed"], ("seed",), minimum=0, integer=True)
        if seed >= 2**64:
            raise r.error(("seed",), "must fit in 64 bits")
        sc["seed"] = seed
    sc["duration_s"] = r.number(top["duration_s"], ("duration_s",), minimum=0, strict=True)

    bss = []
    for i, b in enumerate(r.seq(top["base_stations"], ("base_stations",))):
        p = ("base_stations", i)
        b = r.mapping(b, p, required=("cell_id", "position"), optional=("tx_power_dbm", "ho_margin_db"))
        bss.append(BaseStation(
            cell_id=r.number(b["cell_id"], p + ("cell_id",), integer=True, minimum=0),
            position=r.point(b["position"], p + ("position",)),
            tx_power=r.number(b.get("tx_power_dbm", 40.0), p + ("tx_power_dbm",)),
            ho_margin=r.number(b.get("ho_margin_db", 3.0), p + ("ho_margin_db",), minimum=0),
        ))
    if not bss:
        raise r.error(("base_stations",), "at least one base station is required")
    cells = [b.cell_id for b in bss]
    if len(set(cells)) != len(cells):
        raise r.error(("base_stations",), "cell_id values must be unique")
    sc["base_stations"] = bss

    hosts = []
    for i, h in enumerate(r.seq(top["mec_hosts"], ("mec_hosts",))):
        p = ("mec_hosts", i)
        h = r.mapping(h, p, required=("host_id", "colocated_cell"))
        cell = r.number(h["colocated_cell"], p + ("colocated_cell",), integer=True)
        if cell not in cells:
            raise r.error(p + ("colocated_cell",), f"references unknown cell {cell}")
        hosts.append(MecHost(r.string(str(h["host_id"]), p + ("host_id",)), cell))
    if not hosts:
        raise r.error(("mec_hosts",), "at least one MEC host is required")
    if len({h.host_id for h in hosts}) != len(hosts):
        raise r.error(("mec_hosts",), "host_id values must be unique")
    sc["mec_hosts"] = hosts

    ue = r.mapping(top["ue"], ("ue",), required=("waypoints",), optional=("ue_id", "service_name"))
    wps = []
    for i, w in enumerate(r.seq(ue["waypoints"], ("ue", "waypoints"))):
        p = ("ue", "waypoints", i)
        w = r.mapping(w, p, required=("t", "position"))
        wps.append((r.number(w["t"], p + ("t",)), r.point(w["position"], p + ("position",))))
    if not wps:
        raise r.error(("ue", "waypoints"), "at least one waypoint is required")
    try:
        trace = MobilityTrace(tuple(wps))
    except ValueError as exc:
        raise r.error(("ue", "waypoints"), str(exc)) from None
    sc["ue"] = UeConfig(
        ue_id=r.number(ue.get("ue_id", 1), ("ue", "ue_id"), integer=True, minimum=0),
        service_name=r.string(ue.get("service_name", "video-postprocess"), ("ue", "service_name")),
        trace=trace,
    )

    if "radio" in top:
        radio = r.mapping(top["radio"], ("radio",),
                          optional=("measurement_interval_s", "rsrq_offset_db", "path_loss"))
        if "measurement_interval_s" in radio:
            sc["measurement_interval_s"] = r.number(radio["measurement_interval_s"],
                                                    ("radio", "measurement_interval_s"), minimum=0, strict=True)
        if "rsrq_offset_db" in radio:
            sc["rsrq_offset_db"] = r.number(radio["rsrq_offset_db"], ("radio", "rsrq_offset_db"))
        if "path_loss" in radio:
            p = ("radio", "path_loss")
            pl = r.mapping(radio["path_loss"], p, optional=("pl0_db", "exponent", "d0_m", "shadow_sigma_db"))
            base = PathLossModel()
            sc["path_loss"] = PathLossModel(
                pl0_db=r.number(pl.get("pl0_db", base.pl0_db), p + ("pl0_db",)),
                exponent=r.number(pl.get("exponent", base.exponent), p + ("exponent",), minimum=0, strict=True),
                d0_m=r.number(pl.get("d0_m", base.d0_m), p + ("d0_m",), minimum=0, strict=True),
                shadow_sigma_db=r.number(pl.get("shadow_sigma_db", base.shadow_sigma_db),
                                         p + ("shadow_sigma_db",), minimum=0),
            )

    if "handover" in top:
        ho = r.mapping(top["handover"], ("handover",), optional=("metric", "ttt_s", "cooldown_s"))
        if "metric" in ho:
            if ho["metric"] not in ("RSRP", "RSRQ"):
                raise r.error(("handover", "metric"), "must be RSRP or RSRQ")
            sc["metric"] = Metric(ho["metric"])
        if "ttt_s" in ho:
            sc["ttt_s"] = r.number(ho["ttt_s"], ("handover", "ttt_s"), minimum=0)
        if "cooldown_s" in ho:
            sc["cooldown_s"] = r.number(ho["cooldown_s"], ("handover", "cooldown_s"), minimum=0)

    if "epc" in top:
        keys = ("request_to_command_s", "command_to_path_switch_s", "path_switch_to_end_marker_s")
        epc = r.mapping(top["epc"], ("epc",), optional=keys)
        base = S1Delays()
        vals = [r.number(epc[k], ("epc", k), minimum=0) if k in epc else getattr(base, k[:-2]) for k in keys]
        sc["s1_delays"] = S1Delays(*vals)

    if "orchestrator" in top:
        o = r.mapping(top["orchestrator"], ("orchestrator",),
                      optional=("termination_grace_s", "dns_propagation_s", "start_latency"))
        if "termination_grace_s" in o:
            sc["termination_grace_s"] = r.number(o["termination_grace_s"],
                                                 ("orchestrator", "termination_grace_s"), minimum=0)
        if "dns_propagation_s" in o:
            sc["dns_propagation_s"] = r.number(o["dns_propagation_s"],
                                               ("orchestrator", "dns_propagation_s"), minimum=0)
        if "start_latency" in o:
            p = ("orchestrator", "start_latency")
            names = ("scheduler", "fabric", "container", "app_init")
            sl = r.mapping(o["start_latency"], p, required=names)
            sc["start_latency"] = StartLatencyModel(*(r.dist(sl[n], p + (n,)) for n in names))

    if "app" in top:
        a = r.mapping(top["app"], ("app",),
                      optional=("frame_interval_s", "poll_interval_s", "latency", "energy"))
        for k in ("frame_interval_s", "poll_interval_s"):
            if k in a:
                sc[k] = r.number(a[k], ("app", k), minimum=0, strict=True)
        if "latency" in a:
            p = ("app", "latency")
            names = ("uplink", "processing", "downlink")
            lat = r.mapping(a["latency"], p, required=names, optional=("clip_min_s", "clip_max_s"))
            lo = r.number(lat.get("clip_min_s", 0.0), p + ("clip_min_s",), minimum=0)
            hi = r.number(lat.get("clip_max_s", math.inf), p + ("clip_max_s",), minimum=lo, allow_inf=True)
            sc["latency"] = LatencyModel(*(r.dist(lat[n], p + (n,)) for n in names), clip_min=lo, clip_max=hi)
        if "energy" in a:
            p = ("app", "energy")
            en = r.mapping(a["energy"], p, optional=("idle_w", "encode_w", "offload_w"))
            base = EnergyProfile()
            try:
                sc["energy"] = EnergyProfile(
                    *(r.number(en.get(k, getattr(base, k)), p + (k,), minimum=0)
                      for k in ("idle_w", "encode_w", "offload_w")))
            except ValueError as exc:
                if isinstance(exc, ScenarioError):
                    raise
                raise r.error(p, str(exc)) from None
    return Scenario(**sc)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), source=str(path))


def bundled_scenario_path(name: str) -> Path:
    if name not in BUNDLED:
        raise KeyError(f"no bundled scenario {name!r}; choose from {', '.join(BUNDLED)}")
    return Path(str(resources.files("mecsim") / "scenarios" / f"{name}.yaml"))


def load_bundled(name: str) -> Scenario:
    return load_scenario(bundled_scenario_path(name))
