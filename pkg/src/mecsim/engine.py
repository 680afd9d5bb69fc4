"""Deterministic discrete-event engine.

The engine owns the virtual clock, a single global event queue and the
seeded random source. Models never call each other across module
boundaries at a later time; they schedule events and subscribe to kinds.
"""
from __future__ import annotations

import hashlib
import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable

import numpy as np

log = logging.getLogger(__name__)


class EventKind(str, Enum):
    MEASUREMENT_TICK = "MeasurementTick"
    HANDOVER_SIGNAL = "HandoverSignal"
    EPC_LOG_EMITTED = "EpcLogEmitted"
    POD_KILLED = "PodKilled"
    POD_STARTED = "PodStarted"
    DNS_UPDATED = "DnsUpdated"
    CLIENT_POLL = "ClientPoll"
    FRAME_ROUND_TRIP = "FrameRoundTrip"
    SCENARIO_END = "ScenarioEnd"


class ScheduleError(RuntimeError):
    """An event was scheduled before the current clock."""


@dataclass(frozen=True)
class SimEvent:
    fire_at: float
    sequence: int
    kind: EventKind
    payload: dict[str, Any] = field(default_factory=dict)

    def sort_key(self) -> tuple[float, int]:
        return (self.fire_at, self.sequence)

    def serialize(self) -> str:
        """One trace line: time, kind, and sorted ``key=value`` pairs."""
        pairs = " ".join(f"{k}={_format_value(self.payload[k])}" for k in sorted(self.payload))
        return f"{self.fire_at:.6f}\t{self.kind.value}\t{pairs}"


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Enum):
        return str(value.value)
    if value is None:
        return "-"
    return str(value)


def serialize_trace(events: Iterable[SimEvent]) -> str:
    return "".join(e.serialize() + "\n" for e in events)


@dataclass(frozen=True)
class TraceRecord:
    """A parsed trace line. Payload values stay as strings."""

    fire_at: float
    kind: str
    payload: dict[str, str]


def parse_trace(text: str) -> list[TraceRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}")
        t_str, kind, pairs = parts
        try:
            fire_at = float(t_str)
        except ValueError:
            raise ValueError(f"line {lineno}: bad timestamp {t_str!r}") from None
        if kind not in EventKind._value2member_map_:
            raise ValueError(f"line {lineno}: unknown event kind {kind!r}")
        payload = {}
        for pair in pairs.split():
            key, sep, value = pair.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: malformed pair {pair!r}")
            payload[key] = value
        records.append(TraceRecord(fire_at, kind, payload))
    return records


class RandomSource:
    """Seeded PCG64 generators, one independent sub-stream per model name.

    The sub-stream for ``name`` is derived from ``SeedSequence(seed,
    spawn_key=(h,))`` where ``h`` is the first 8 bytes of SHA-256 of the
    name, so adding a new named stream never shifts existing draws.
    """

    def __init__(self, seed: int):
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self._streams: dict[str, np.random.Generator] = {}

    def stream(self, name: str) -> np.random.Generator:
        if name not in self._streams:
            key = int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big")
            seq = np.random.SeedSequence(self.seed, spawn_key=(key,))
            self._streams[name] = np.random.Generator(np.random.PCG64(seq))
        return self._streams[name]


Handler = Callable[[SimEvent], None]


class Engine:
    """Single-threaded event loop over simulated seconds."""

    def __init__(self, seed: int = 0):
        self.now = 0.0
        self.random = RandomSource(seed)
        self._queue: list[tuple[float, int, SimEvent]] = []
        self._sequence = 0
        self._handlers: dict[EventKind, list[Handler]] = defaultdict(list)
        self.trace: list[SimEvent] = []

    def subscribe(self, kind: EventKind, handler: Handler) -> None:
        self._handlers[kind].append(handler)

    def schedule(self, fire_at: float, kind: EventKind, payload: dict[str, Any] | None = None) -> SimEvent:
        if fire_at < self.now:
            raise ScheduleError(f"event {kind.value} at t={fire_at} is before clock t={self.now}")
        event = SimEvent(float(fire_at), self._sequence, EventKind(kind), dict(payload or {}))
        self._sequence += 1
        heapq.heappush(self._queue, (event.fire_at, event.sequence, event))
        return event

    def schedule_in(self, delay: float, kind: EventKind, payload: dict[str, Any] | None = None) -> SimEvent:
        return self.schedule(self.now + delay, kind, payload)

    def pending(self) -> int:
        return len(self._queue)

    def step(self) -> SimEvent | None:
        if not self._queue:
            return None
        _, _, event = heapq.heappop(self._queue)
        # Unreachable through schedule(); guards against direct heap edits.
        assert event.fire_at >= self.now, "clock would move backwards"
        self.now = event.fire_at
        self.trace.append(event)
        for handler in list(self._handlers.get(event.kind, ())):
            handler(event)
        return event

    def run_until(self, end: float) -> list[SimEvent]:
        """Process every event with ``fire_at <= end``; the clock finishes at ``end``."""
        start = len(self.trace)
        while self._queue and self._queue[0][0] <= end:
            self.step()
        self.now = max(self.now, float(end))
        return self.trace[start:]
