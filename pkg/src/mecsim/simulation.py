"""Wires the models onto one engine and runs a scenario end to end."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .app import StreamSession
from .controller import MigrationController, MigrationRecord, TriggerPolicy
from .engine import Engine, EventKind, SimEvent
from .epc import Epc, S1Delays, S1Procedure, S1State
from .orchestrator import MecHost, Orchestrator, StartLatencyModel
from .radio import HandoverDecision, Metric, RadioSample, evaluate_handover, measure_cells, position_at
from .scenario import Scenario


@dataclass
class SimulationResult:
    scenario: Scenario
    engine: Engine
    epc: Epc
    orchestrator: Orchestrator
    controller: MigrationController
    session: StreamSession
    rss: list[RadioSample] = field(default_factory=list)
    decisions: list[HandoverDecision] = field(default_factory=list)

    @property
    def trace(self) -> list[SimEvent]:
        return self.engine.trace

    @property
    def migrations(self) -> list[MigrationRecord]:
        return self.controller.records

    @property
    def handovers(self) -> list[S1Procedure]:
        return self.epc.procedures


class Simulation:
    """One scenario on one engine. ``run()`` may be called once."""

    def __init__(self, scenario: Scenario, seed: int | None = None):
        self.scenario = sc = scenario
        self.engine = engine = Engine(sc.seed if seed is None else seed)
        self.radio_rng = engine.random.stream("radio")
        self.epc = Epc(engine, sc.s1_delays)
        hosts = [MecHost(h.host_id, h.colocated_cell) for h in sc.mec_hosts]
        self.orchestrator = Orchestrator(engine, hosts, termination_grace=sc.termination_grace_s)
        self.controller = MigrationController(
            engine, self.epc, self.orchestrator, sc.start_latency,
            dns_propagation=sc.dns_propagation_s, policy=TriggerPolicy(cooldown=sc.cooldown_s))
        self.session = StreamSession(
            engine, self.orchestrator, sc.ue.service_name, sc.latency, ue_id=sc.ue.ue_id,
            frame_interval=sc.frame_interval_s, poll_interval=sc.poll_interval_s, profile=sc.energy)
        self.margins = {b.cell_id: b.ho_margin for b in sc.base_stations}
        self.serving: int | None = None
        self._ttt_state: dict[int, float] = {}
        self.rss: list[RadioSample] = []
        self.decisions: list[HandoverDecision] = []
        engine.subscribe(EventKind.MEASUREMENT_TICK, self._on_tick)
        engine.subscribe(EventKind.HANDOVER_SIGNAL, self._on_handover_signal)
        self._ran = False

    def _measure(self) -> list[RadioSample]:
        sc = self.scenario
        t = self.engine.now
        samples = measure_cells(position_at(sc.ue.trace, t), sc.base_stations, t, sc.path_loss,
                                self.radio_rng, self.serving, sc.rsrq_offset_db)
        self.rss.extend(samples)
        return samples

    def _attach(self) -> None:
        sc = self.scenario
        samples = self._measure()
        best = max(samples, key=lambda s: (s.metric(sc.metric), -s.cell_id))
        self.serving = best.cell_id
        self.rss[-len(samples):] = [
            RadioSample(s.t, s.cell_id, s.rsrp, s.rsrq, s.cell_id == best.cell_id) for s in samples]
        local = self.orchestrator.hosts_for_cell(best.cell_id) or list(self.orchestrator.hosts.values())
        host = min(local, key=lambda h: h.host_id)
        self.orchestrator.deploy(sc.ue.service_name, host.host_id)

    def _on_tick(self, event: SimEvent) -> None:
        sc = self.scenario
        samples = self._measure()
        serving = next(s for s in samples if s.serving)
        neighbors = [s for s in samples if not s.serving]
        decision = evaluate_handover(
            serving, neighbors, self.margins, sc.ttt_s, metric=sc.metric, ue_id=sc.ue.ue_id,
            qualified_since=self._ttt_state if sc.ttt_s > 0 else None)
        if decision is not None:
            self.decisions.append(decision)
            self.epc.initiate_s1(decision)
        k = event.payload["k"] + 1
        if k * sc.measurement_interval_s <= sc.duration_s:
            self.engine.schedule(k * sc.measurement_interval_s, EventKind.MEASUREMENT_TICK, {"k": k})

    def _on_handover_signal(self, event: SimEvent) -> None:
        if S1State(event.payload["state"]) is S1State.COMPLETE and event.payload["ue"] == self.scenario.ue.ue_id:
            self.serving = event.payload["dst"]
            self._ttt_state.clear()

    def run(self) -> SimulationResult:
        if self._ran:
            raise RuntimeError("simulation already run")
        self._ran = True
        sc = self.scenario
        self._attach()
        self.session.start()
        if sc.measurement_interval_s <= sc.duration_s:
            self.engine.schedule(sc.measurement_interval_s, EventKind.MEASUREMENT_TICK, {"k": 1})
        self.engine.schedule(sc.duration_s, EventKind.SCENARIO_END, {})
        self.engine.run_until(sc.duration_s)
        return SimulationResult(sc, self.engine, self.epc, self.orchestrator, self.controller,
                                self.session, self.rss, self.decisions)


def run_scenario(scenario: Scenario, seed: int | None = None) -> SimulationResult:
    return Simulation(scenario, seed).run()


def migration_sweep(seeds: Iterable[int], model: StartLatencyModel | None = None,
                    dns_propagation: float = 0.5) -> list[MigrationRecord]:
    """Run one reactive two-host migration per seed and collect the records.

    Each run is a fresh engine: the service starts on ``mec1`` (cell 1) and
    a single S1 handover from cell 1 to cell 2 drives the pipeline.
    """
    model = model or StartLatencyModel.calibrated()
    records = []
    for seed in seeds:
        engine = Engine(seed)
        epc = Epc(engine, S1Delays())
        orch = Orchestrator(engine, [MecHost("mec1", 1), MecHost("mec2", 2)])
        ctl = MigrationController(engine, epc, orch, model, dns_propagation=dns_propagation)
        orch.deploy("video-postprocess", "mec1")
        epc.initiate_s1(HandoverDecision(0.0, 1, 1, 2, 3.0, Metric.RSRP))
        engine.run_until(float("inf"))
        records.extend(ctl.records)
    return records
