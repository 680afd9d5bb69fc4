"""A minimal container-orchestrator model.

Hosts can be cordoned, pods start after four staged delays, and a DNS
registry maps service names to pod endpoints with a propagation delay.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dists import Distribution
from .engine import Engine, EventKind, SimEvent

log = logging.getLogger(__name__)


class OrchestratorError(Exception):
    pass


class NoSchedulableHost(OrchestratorError):
    """Every candidate host is cordoned."""


class PodState(str, Enum):
    PENDING = "Pending"
    STARTING = "Starting"
    RUNNING = "Running"
    TERMINATING = "Terminating"
    TERMINATED = "Terminated"


_TRANSITIONS = {
    PodState.PENDING: {PodState.STARTING},
    PodState.STARTING: {PodState.RUNNING},
    PodState.RUNNING: {PodState.TERMINATING},
    PodState.TERMINATING: {PodState.TERMINATED},
    PodState.TERMINATED: set(),
}


@dataclass
class MecHost:
    host_id: str
    colocated_cell: int
    cordoned: bool = False


@dataclass
class Pod:
    pod_id: str
    service_name: str
    host_id: str
    t_scheduled: float
    state: PodState = PodState.PENDING
    t_killed: float | None = None
    t_started: float | None = None
    components: dict[str, float] = field(default_factory=dict)

    def transition(self, to: PodState) -> None:
        if to not in _TRANSITIONS[self.state]:
            raise OrchestratorError(f"pod {self.pod_id}: illegal transition {self.state.value} -> {to.value}")
        self.state = to

    @property
    def start_latency(self) -> float:
        return sum(self.components.values())


COMPONENTS = ("scheduler", "fabric", "container", "app_init")


@dataclass(frozen=True)
class StartLatencyModel:
    scheduler_delay: Distribution
    fabric_delay: Distribution
    container_start_delay: Distribution
    app_init_delay: Distribution

    @classmethod
    def fixed(cls, scheduler=0.0, fabric=0.0, container=0.0, app_init=0.0) -> "StartLatencyModel":
        return cls(*(Distribution.fixed(v) for v in (scheduler, fabric, container, app_init)))

    @classmethod
    def calibrated(cls) -> "StartLatencyModel":
        # Total: mean ~4.43 s, p95 ~6.82 s, >99.9% inside [2.0, 8.5] s.
        return cls(
            Distribution.lognormal(0.5, 0.25),
            Distribution.lognormal(0.5, 0.25),
            Distribution.lognormal(1.0, 0.25),
            Distribution.lognormal(2.45, 0.48, max=6.0),
        )

    def parts(self) -> tuple[Distribution, ...]:
        return (self.scheduler_delay, self.fabric_delay, self.container_start_delay, self.app_init_delay)

    def draw(self, rng: np.random.Generator) -> dict[str, float]:
        return {name: dist.draw(rng) for name, dist in zip(COMPONENTS, self.parts())}


@dataclass(frozen=True)
class ServiceRecord:
    service_name: str
    endpoint: tuple[str, str]
    t_last_update: float


@dataclass(frozen=True)
class _PendingUpdate:
    issued: int
    effective_at: float
    endpoint: tuple[str, str]


class DnsRegistry:
    """Service name -> endpoint bindings with delayed switch-over.

    ``resolve(name, t)`` returns the most recently *issued* update whose
    effective time is ``<= t``; it depends only on the update history and
    ``t``.
    """

    def __init__(self):
        self._updates: dict[str, list[_PendingUpdate]] = {}
        self._issued = itertools.count()

    def update(self, service_name: str, endpoint: tuple[str, str], effective_at: float) -> None:
        self._updates.setdefault(service_name, []).append(
            _PendingUpdate(next(self._issued), effective_at, endpoint))

    def record(self, service_name: str, t: float) -> ServiceRecord | None:
        live = [u for u in self._updates.get(service_name, ()) if u.effective_at <= t]
        if not live:
            return None
        u = max(live, key=lambda u: u.issued)
        return ServiceRecord(service_name, u.endpoint, u.effective_at)

    def resolve(self, service_name: str, t: float) -> tuple[str, str] | None:
        rec = self.record(service_name, t)
        return rec.endpoint if rec else None

    def services(self) -> list[str]:
        return sorted(self._updates)


class Orchestrator:
    def __init__(self, engine: Engine, hosts: list[MecHost], *, termination_grace: float = 0.0,
                 rng: np.random.Generator | None = None):
        ids = [h.host_id for h in hosts]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate host_id")
        self.engine = engine
        self.hosts = {h.host_id: h for h in hosts}
        self.pods: dict[str, Pod] = {}
        self.dns = DnsRegistry()
        self.termination_grace = termination_grace
        self.rng = rng if rng is not None else engine.random.stream("orchestrator")
        self.errors: list[str] = []
        # (sequence, t, action, subject) for every mutating call.
        self.journal: list[tuple[int, float, str, str]] = []
        self._pod_ids = itertools.count(1)
        engine.subscribe(EventKind.POD_STARTED, self._on_started)
        engine.subscribe(EventKind.POD_KILLED, self._on_killed)

    def _note(self, action: str, subject: str) -> int:
        seq = len(self.journal)
        self.journal.append((seq, self.engine.now, action, subject))
        return seq

    def host(self, host_id: str) -> MecHost:
        try:
            return self.hosts[host_id]
        except KeyError:
            raise OrchestratorError(f"unknown host {host_id!r}") from None

    def hosts_for_cell(self, cell_id: int) -> list[MecHost]:
        return [h for h in self.hosts.values() if h.colocated_cell == cell_id]

    def cordon(self, host_id: str) -> None:
        self.host(host_id).cordoned = True
        self._note("cordon", host_id)

    def uncordon(self, host_id: str) -> None:
        self.host(host_id).cordoned = False
        self._note("uncordon", host_id)

    def running_pods(self, service_name: str | None = None, host_id: str | None = None) -> list[Pod]:
        return [p for p in self.pods.values() if p.state is PodState.RUNNING
                and (service_name is None or p.service_name == service_name)
                and (host_id is None or p.host_id == host_id)]

    def deploy(self, service_name: str, host_id: str) -> Pod:
        """Place an already-running pod and register it in DNS immediately."""
        self.host(host_id)
        now = self.engine.now
        pod = Pod(self._new_pod_id(), service_name, host_id, t_scheduled=now)
        pod.transition(PodState.STARTING)
        pod.transition(PodState.RUNNING)
        pod.t_started = now
        self.pods[pod.pod_id] = pod
        self.dns.update(service_name, (host_id, pod.pod_id), now)
        self._note("deploy", pod.pod_id)
        return pod

    def _new_pod_id(self) -> str:
        return f"pod-{next(self._pod_ids)}"

    def kill_pod(self, pod_id: str) -> bool:
        pod = self.pods.get(pod_id)
        if pod is None or pod.state is not PodState.RUNNING:
            state = pod.state.value if pod else "missing"
            log.warning("kill_pod(%s) ignored: pod is %s", pod_id, state)
            return False
        pod.transition(PodState.TERMINATING)
        pod.t_killed = self.engine.now
        self._note("kill", pod_id)
        payload = {"pod": pod_id, "service": pod.service_name, "host": pod.host_id}
        self.engine.schedule(self.engine.now, EventKind.POD_KILLED, {**payload, "phase": "terminating"})
        self.engine.schedule(self.engine.now + self.termination_grace, EventKind.POD_KILLED,
                             {**payload, "phase": "terminated"})
        return True

    def _on_killed(self, event: SimEvent) -> None:
        if event.payload["phase"] == "terminated":
            self.pods[event.payload["pod"]].transition(PodState.TERMINATED)

    def schedule_pod(self, service_name: str, model: StartLatencyModel,
                     hosts: list[MecHost] | None = None) -> Pod:
        """Bind a new pod to the lowest-id uncordoned host and start it.

        Raises NoSchedulableHost when every candidate is cordoned.
        """
        candidates = sorted((h for h in (hosts if hosts is not None else self.hosts.values())
                             if not h.cordoned), key=lambda h: h.host_id)
        if not candidates:
            msg = f"ERROR no schedulable host for service {service_name} at t={self.engine.now:.3f}"
            self.errors.append(msg)
            log.error(msg)
            raise NoSchedulableHost(msg)
        host = candidates[0]
        now = self.engine.now
        pod = Pod(self._new_pod_id(), service_name, host.host_id, t_scheduled=now)
        pod.components = model.draw(self.rng)
        pod.transition(PodState.STARTING)
        self.pods[pod.pod_id] = pod
        self._note("schedule", pod.pod_id)
        self.engine.schedule(now + pod.start_latency, EventKind.POD_STARTED,
                             {"pod": pod.pod_id, "service": service_name, "host": host.host_id,
                              **{f"{k}_d": v for k, v in pod.components.items()}})
        return pod

    def _on_started(self, event: SimEvent) -> None:
        pod = self.pods[event.payload["pod"]]
        pod.transition(PodState.RUNNING)
        pod.t_started = self.engine.now

    def update_dns(self, service_name: str, pod_id: str, propagation_delay: float) -> float:
        """Point ``service_name`` at ``pod_id`` once ``propagation_delay`` elapses.

        Returns the time at which the new record takes effect.
        """
        pod = self.pods[pod_id]
        if pod.state not in (PodState.STARTING, PodState.RUNNING):
            raise OrchestratorError(f"DNS target pod {pod_id} is {pod.state.value}")
        effective = self.engine.now + propagation_delay
        self.dns.update(service_name, (pod.host_id, pod_id), effective)
        self._note("dns", service_name)
        self.engine.schedule(effective, EventKind.DNS_UPDATED,
                             {"service": service_name, "pod": pod_id, "host": pod.host_id})
        return effective

    def resolve(self, service_name: str, t: float | None = None) -> tuple[str, str] | None:
        return self.dns.resolve(service_name, self.engine.now if t is None else t)

    def endpoint_running(self, service_name: str, t: float | None = None) -> bool:
        ep = self.resolve(service_name, t)
        return ep is not None and self.pods[ep[1]].state is PodState.RUNNING
