"""Reactive migration trigger: watches the EPC log and moves services
off the source cell's MEC host with cordon, kill, reschedule, DNS update."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .engine import Engine, EventKind, SimEvent
from .epc import REQUEST_TOKEN, Epc, EpcLogEntry, parse_log_line
from .orchestrator import NoSchedulableHost, Orchestrator, StartLatencyModel

log = logging.getLogger(__name__)


class Outcome(str, Enum):
    COMPLETED = "Completed"
    FAILED = "Failed"


@dataclass
class TriggerPolicy:
    """When to react to a log line.

    ``hook`` is an extra predicate on the parsed entry; pre-emptive
    policies can plug in there without touching the pipeline.
    """

    kind: str = "ReactiveOnS1Request"
    cooldown: float = 5.0
    hook: Callable[[EpcLogEntry], bool] | None = None

    def __post_init__(self):
        if self.kind != "ReactiveOnS1Request":
            raise ValueError(f"unsupported trigger policy {self.kind!r}")
        if self.cooldown < 0:
            raise ValueError("cooldown must be >= 0")


@dataclass
class MigrationRecord:
    service_name: str
    trigger_log_t: float
    src_host: str
    t_killed: float | None = None
    t_started: float | None = None
    t_dns_updated: float | None = None
    dst_host: str | None = None
    pod_id: str | None = None
    components: dict[str, float] = field(default_factory=dict)
    outcome: Outcome | None = None
    # journal sequence numbers of cordon/kill/schedule/dns, in that order
    steps: dict[str, int] = field(default_factory=dict)

    @property
    def migration_latency(self) -> float | None:
        if self.t_started is None or self.t_killed is None:
            return None
        return self.t_started - self.t_killed


class MigrationController:
    def __init__(self, engine: Engine, epc: Epc, orchestrator: Orchestrator,
                 model: StartLatencyModel, *, dns_propagation: float = 0.5,
                 policy: TriggerPolicy | None = None):
        self.engine = engine
        self.orchestrator = orchestrator
        self.model = model
        self.dns_propagation = dns_propagation
        self.policy = policy or TriggerPolicy()
        self.records: list[MigrationRecord] = []
        self._cursor = epc.reader()
        self._last_trigger: dict[str, float] = {}
        self._by_pod: dict[str, MigrationRecord] = {}
        engine.subscribe(EventKind.EPC_LOG_EMITTED, self._on_log_event)
        engine.subscribe(EventKind.POD_STARTED, self._on_pod_started)
        engine.subscribe(EventKind.DNS_UPDATED, self._on_dns_updated)

    def _on_log_event(self, event: SimEvent) -> None:
        for entry in self._cursor.read():
            self.on_log_entry(entry)

    def on_log_entry(self, entry: EpcLogEntry) -> list[MigrationRecord]:
        fields = parse_log_line(entry.text)
        if fields is None or fields["token"] != REQUEST_TOKEN:
            return []
        if self.policy.hook is not None and not self.policy.hook(entry):
            return []
        orch = self.orchestrator
        # A host named as handover target is brought back into rotation.
        for h in orch.hosts_for_cell(fields["dst"]):
            if h.cordoned:
                orch.uncordon(h.host_id)
        started = []
        for src in orch.hosts_for_cell(fields["src"]):
            for service in sorted({p.service_name for p in orch.running_pods(host_id=src.host_id)}):
                if self._suppressed(service, entry.t):
                    log.info("ignoring trigger for %s at t=%.3f (in flight or cooldown)", service, entry.t)
                    continue
                self._last_trigger[service] = entry.t
                started.append(self.migrate(service, src.host_id, trigger_t=entry.t))
        return started

    def _suppressed(self, service: str, t: float) -> bool:
        if any(r.service_name == service and r.outcome is None for r in self.records):
            return True
        last = self._last_trigger.get(service)
        return last is not None and t - last < self.policy.cooldown

    def migrate(self, service_name: str, src_host: str, *, trigger_t: float | None = None) -> MigrationRecord:
        orch = self.orchestrator
        pods = orch.running_pods(service_name, src_host)
        if not pods:
            raise ValueError(f"service {service_name!r} is not running on {src_host!r}")
        rec = MigrationRecord(service_name, self.engine.now if trigger_t is None else trigger_t, src_host)
        self.records.append(rec)
        orch.cordon(src_host)
        rec.steps["cordon"] = len(orch.journal) - 1
        for pod in pods:
            orch.kill_pod(pod.pod_id)
        rec.steps["kill"] = len(orch.journal) - 1
        rec.t_killed = self.engine.now
        try:
            new = orch.schedule_pod(service_name, self.model)
        except NoSchedulableHost:
            rec.outcome = Outcome.FAILED
            return rec
        rec.steps["schedule"] = len(orch.journal) - 1
        rec.pod_id = new.pod_id
        rec.dst_host = new.host_id
        rec.components = dict(new.components)
        self._by_pod[new.pod_id] = rec
        return rec

    def _on_pod_started(self, event: SimEvent) -> None:
        rec = self._by_pod.get(event.payload["pod"])
        if rec is None:
            return
        rec.t_started = self.engine.now
        self.orchestrator.update_dns(rec.service_name, rec.pod_id, self.dns_propagation)
        rec.steps["dns"] = len(self.orchestrator.journal) - 1

    def _on_dns_updated(self, event: SimEvent) -> None:
        rec = self._by_pod.get(event.payload["pod"])
        if rec is None or rec.outcome is not None:
            return
        rec.t_dns_updated = self.engine.now
        rec.outcome = Outcome.COMPLETED

    def completed(self) -> list[MigrationRecord]:
        return [r for r in self.records if r.outcome is Outcome.COMPLETED]
