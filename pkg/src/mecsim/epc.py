"""EPC/MME side of an S1 handover and the text log it writes.

Log lines have the fixed shape::

    <t:.3f> <LEVEL> <TOKEN> ue=<id> src=<cell> dst=<cell>

The migration controller pattern-matches this text, so it must not drift.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum

from .engine import Engine, EventKind, SimEvent
from .radio import HandoverDecision

log = logging.getLogger(__name__)

REQUEST_TOKEN = "S1-HANDOVER-REQUEST"
END_MARKER_TOKEN = "END-MARKER"
DROPPED_TOKEN = "S1-HANDOVER-DROPPED"

LOG_LINE_RE = re.compile(
    r"^(?P<t>\d+\.\d{3}) (?P<level>INFO|WARN) (?P<token>[A-Z0-9-]+) "
    r"ue=(?P<ue>\d+) src=(?P<src>\d+) dst=(?P<dst>\d+)$"
)


class S1State(str, Enum):
    REQUESTED = "Requested"
    COMMAND_SENT = "CommandSent"
    PATH_SWITCHED = "PathSwitched"
    END_MARKER_SENT = "EndMarkerSent"
    COMPLETE = "Complete"


_ORDER = list(S1State)


@dataclass
class S1Delays:
    request_to_command: float = 0.02
    command_to_path_switch: float = 0.03
    path_switch_to_end_marker: float = 0.05

    def __post_init__(self):
        if min(self.request_to_command, self.command_to_path_switch, self.path_switch_to_end_marker) < 0:
            raise ValueError("S1 procedure delays must be non-negative")


@dataclass
class S1Procedure:
    ue_id: int
    source_cell: int
    target_cell: int
    t_requested: float
    state: S1State = S1State.REQUESTED
    t_end_marker: float | None = None

    def advance(self, to: S1State) -> None:
        if _ORDER.index(to) != _ORDER.index(self.state) + 1:
            raise RuntimeError(f"illegal S1 transition {self.state.value} -> {to.value}")
        self.state = to


@dataclass(frozen=True)
class EpcLogEntry:
    t: float
    level: str
    text: str

    @property
    def token(self) -> str:
        return self.text.split(" ", 3)[2]


def format_log_line(t: float, level: str, token: str, ue_id: int, src: int, dst: int) -> str:
    return f"{t:.3f} {level} {token} ue={ue_id} src={src} dst={dst}"


def parse_log_line(text: str) -> dict | None:
    """Fields of a canonical EPC log line, or None if it does not match."""
    m = LOG_LINE_RE.match(text.strip())
    if m is None:
        return None
    return {
        "t": float(m["t"]),
        "level": m["level"],
        "token": m["token"],
        "ue": int(m["ue"]),
        "src": int(m["src"]),
        "dst": int(m["dst"]),
    }


class LogCursor:
    """Index-based reader; never skips or repeats entries that share a timestamp."""

    def __init__(self, entries: list[EpcLogEntry]):
        self._entries = entries
        self._pos = 0

    def read(self) -> list[EpcLogEntry]:
        new = self._entries[self._pos:]
        self._pos = len(self._entries)
        return new


class Epc:
    def __init__(self, engine: Engine, delays: S1Delays | None = None):
        self.engine = engine
        self.delays = delays or S1Delays()
        self.entries: list[EpcLogEntry] = []
        self.procedures: list[S1Procedure] = []
        self._in_flight: dict[int, S1Procedure] = {}
        engine.subscribe(EventKind.HANDOVER_SIGNAL, self._on_signal)

    def in_flight(self, ue_id: int) -> bool:
        return ue_id in self._in_flight

    def _emit(self, level: str, token: str, proc_or_decision) -> EpcLogEntry:
        p = proc_or_decision
        t = self.engine.now
        entry = EpcLogEntry(t, level, format_log_line(t, level, token, p.ue_id, p.source_cell, p.target_cell))
        self.entries.append(entry)
        self.engine.schedule(t, EventKind.EPC_LOG_EMITTED, {"level": level, "token": token, "ue": p.ue_id})
        return entry

    def initiate_s1(self, decision: HandoverDecision) -> S1Procedure | None:
        if decision.ue_id in self._in_flight:
            log.warning("dropping handover for ue %s: procedure already in flight", decision.ue_id)
            self._emit("WARN", DROPPED_TOKEN, decision)
            return None
        now = self.engine.now
        proc = S1Procedure(decision.ue_id, decision.source_cell, decision.target_cell, t_requested=now)
        self._in_flight[proc.ue_id] = proc
        self.procedures.append(proc)
        self._emit("INFO", REQUEST_TOKEN, proc)
        d = self.delays
        t1 = now + d.request_to_command
        t2 = t1 + d.command_to_path_switch
        t3 = t2 + d.path_switch_to_end_marker
        for at, state in ((t1, S1State.COMMAND_SENT), (t2, S1State.PATH_SWITCHED),
                          (t3, S1State.END_MARKER_SENT), (t3, S1State.COMPLETE)):
            self.engine.schedule(at, EventKind.HANDOVER_SIGNAL, {
                "ue": proc.ue_id, "src": proc.source_cell, "dst": proc.target_cell, "state": state,
            })
        return proc

    def _on_signal(self, event: SimEvent) -> None:
        proc = self._in_flight[event.payload["ue"]]
        state = S1State(event.payload["state"])
        proc.advance(state)
        if state is S1State.END_MARKER_SENT:
            proc.t_end_marker = self.engine.now
            self._emit("INFO", END_MARKER_TOKEN, proc)
        elif state is S1State.COMPLETE:
            del self._in_flight[proc.ue_id]

    def tail_log(self, since: float) -> list[EpcLogEntry]:
        return [e for e in self.entries if e.t > since]

    def reader(self) -> LogCursor:
        return LogCursor(self.entries)

    def export_text(self) -> str:
        return "".join(e.text + "\n" for e in self.entries)
