"""Client side of the offloaded video session: per-frame round trips,
disruption and polling reconnection, and UE energy accounting."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dists import Distribution
from .engine import Engine, EventKind, SimEvent
from .orchestrator import Orchestrator

log = logging.getLogger(__name__)


class SessionState(str, Enum):
    CONNECTED = "Connected"
    DISRUPTED = "Disrupted"
    POLLING = "Polling"


class EnergyMode(str, Enum):
    LOCAL = "LocalProcessing"
    OFFLOADED = "Offloaded"
    IDLE = "Idle"


@dataclass(frozen=True)
class EnergyProfile:
    idle_w: float = 2.1
    encode_w: float = 6.5
    offload_w: float = 2.1

    def __post_init__(self):
        if self.offload_w > self.encode_w:
            raise ValueError("offload_w must not exceed encode_w")

    def power(self, mode: EnergyMode) -> float:
        return {EnergyMode.LOCAL: self.encode_w,
                EnergyMode.OFFLOADED: self.offload_w,
                EnergyMode.IDLE: self.idle_w}[EnergyMode(mode)]


def energy(duration_s: float, mode: EnergyMode, profile: EnergyProfile = EnergyProfile()) -> float:
    """Joules spent over ``duration_s`` in ``mode``."""
    if duration_s < 0:
        raise ValueError("duration must be >= 0")
    return duration_s * profile.power(mode)


@dataclass(frozen=True)
class LatencyModel:
    uplink_delay: Distribution
    processing_delay: Distribution
    downlink_delay: Distribution
    clip_min: float = 0.0
    clip_max: float = float("inf")

    @classmethod
    def fixed(cls, uplink=0.0, processing=0.0, downlink=0.0) -> "LatencyModel":
        return cls(Distribution.fixed(uplink), Distribution.fixed(processing), Distribution.fixed(downlink))

    @classmethod
    def calibrated(cls) -> "LatencyModel":
        # Total: mean ~0.547 s, p95 ~1.06 s, clipped to the observed 0.09..1.52 s.
        return cls(
            Distribution.lognormal(0.2, 0.74),
            Distribution.lognormal(0.15, 0.74),
            Distribution.lognormal(0.2, 0.74),
            clip_min=0.09,
            clip_max=1.52,
        )

    def draw(self, rng: np.random.Generator) -> float:
        total = sum(d.draw(rng) for d in (self.uplink_delay, self.processing_delay, self.downlink_delay))
        return min(max(total, self.clip_min), self.clip_max)


@dataclass(frozen=True)
class LatencySample:
    t: float
    e2e: float


@dataclass
class StreamSession:
    """Connection state machine of one UE's offloaded stream.

    Time is charged to ``connected_time`` or ``disrupted_time`` at every
    state change (Polling counts as disrupted), so the two always sum to
    the elapsed session time.
    """

    engine: Engine
    orchestrator: Orchestrator
    service_name: str
    latency_model: LatencyModel
    ue_id: int = 1
    frame_interval: float = 1.0
    poll_interval: float = 1.0
    profile: EnergyProfile = EnergyProfile()
    rng: np.random.Generator | None = None
    state: SessionState = SessionState.CONNECTED
    t_disrupted: list[float] = field(default_factory=list)
    t_reconnected: list[float] = field(default_factory=list)
    samples: list[LatencySample] = field(default_factory=list)
    connected_time: float = 0.0
    disrupted_time: float = 0.0
    t_start: float = 0.0
    t_end: float | None = None

    def __post_init__(self):
        if self.frame_interval <= 0 or self.poll_interval <= 0:
            raise ValueError("frame and poll intervals must be > 0")
        if self.rng is None:
            self.rng = self.engine.random.stream("app")
        self._t_mark = self.engine.now
        self.t_start = self.engine.now
        self._endpoint = None
        # Frame ticks carry the connection generation so ticks left over
        # from before a disruption are ignored after reconnecting.
        self._gen = 0
        e = self.engine
        e.subscribe(EventKind.FRAME_ROUND_TRIP, self._on_frame)
        e.subscribe(EventKind.CLIENT_POLL, self._on_poll)
        e.subscribe(EventKind.POD_KILLED, self._on_pod_killed)
        e.subscribe(EventKind.SCENARIO_END, self._on_end)

    def start(self) -> None:
        """Connect at the current time and schedule the first frame."""
        self._endpoint = self.orchestrator.resolve(self.service_name)
        if not self.orchestrator.endpoint_running(self.service_name):
            self._disrupt()
            return
        self._schedule_frame(self.engine.now)

    def _schedule_frame(self, at: float) -> None:
        self.engine.schedule(at, EventKind.FRAME_ROUND_TRIP, {"ue": self.ue_id, "gen": self._gen})

    @property
    def closed(self) -> bool:
        return self.t_end is not None

    def _mine(self, event: SimEvent) -> bool:
        return not self.closed and event.payload.get("ue") == self.ue_id

    def _charge(self) -> None:
        now = self.engine.now
        if self.state is SessionState.CONNECTED:
            self.connected_time += now - self._t_mark
        else:
            self.disrupted_time += now - self._t_mark
        self._t_mark = now

    def _disrupt(self) -> None:
        self._charge()
        self.state = SessionState.DISRUPTED
        self.t_disrupted.append(self.engine.now)
        self.engine.schedule(self.engine.now + self.poll_interval, EventKind.CLIENT_POLL, {"ue": self.ue_id})

    def _on_frame(self, event: SimEvent) -> None:
        if self._mine(event) and self.state is SessionState.CONNECTED and event.payload["gen"] == self._gen:
            self.frame_roundtrip()

    def frame_roundtrip(self) -> LatencySample | None:
        orch = self.orchestrator
        if not orch.endpoint_running(self.service_name):
            self._disrupt()
            return None
        sample = LatencySample(self.engine.now, self.latency_model.draw(self.rng))
        self.samples.append(sample)
        self._schedule_frame(self.engine.now + self.frame_interval)
        return sample

    def _on_pod_killed(self, event: SimEvent) -> None:
        if self.closed or event.payload.get("phase") != "terminating":
            return
        if (self.state is SessionState.CONNECTED and self._endpoint is not None
                and self._endpoint[1] == event.payload["pod"]):
            self._disrupt()

    def _on_poll(self, event: SimEvent) -> None:
        if self._mine(event) and self.state is not SessionState.CONNECTED:
            self.poll()

    def poll(self) -> bool:
        if self.state is SessionState.DISRUPTED:
            self.state = SessionState.POLLING
        orch = self.orchestrator
        if orch.endpoint_running(self.service_name):
            self._charge()
            self.state = SessionState.CONNECTED
            self._endpoint = orch.resolve(self.service_name)
            self.t_reconnected.append(self.engine.now)
            self._gen += 1
            self._schedule_frame(self.engine.now)
            return True
        self.engine.schedule(self.engine.now + self.poll_interval, EventKind.CLIENT_POLL, {"ue": self.ue_id})
        return False

    def _on_end(self, event: SimEvent) -> None:
        if not self.closed:
            self.close()

    def close(self) -> None:
        self._charge()
        self.t_end = self.engine.now

    @property
    def duration(self) -> float:
        end = self.engine.now if self.t_end is None else self.t_end
        return end - self.t_start

    def downtimes(self) -> list[float]:
        return [r - d for d, r in zip(self.t_disrupted, self.t_reconnected)]

    def energy_offloaded(self) -> float:
        """Session energy: offload power while connected, idle power while down."""
        return (energy(self.connected_time, EnergyMode.OFFLOADED, self.profile)
                + energy(self.disrupted_time, EnergyMode.IDLE, self.profile))

    def energy_local(self) -> float:
        """Energy the same session would cost encoding on-device throughout."""
        return energy(self.duration, EnergyMode.LOCAL, self.profile)
