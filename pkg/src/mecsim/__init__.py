"""Deterministic simulator of reactive MEC service migration on LTE S1 handovers."""
from .app import EnergyMode, EnergyProfile, LatencyModel, StreamSession, energy
from .controller import MigrationController, MigrationRecord, Outcome, TriggerPolicy
from .dists import Distribution
from .engine import Engine, EventKind, RandomSource, ScheduleError, SimEvent
from .epc import Epc, EpcLogEntry, S1Delays, S1Procedure
from .metrics import Summary, ecdf, histogram, percentile, summarize
from .orchestrator import MecHost, NoSchedulableHost, Orchestrator, Pod, PodState, StartLatencyModel
from .radio import (BaseStation, HandoverDecision, Metric, MobilityTrace, PathLossModel, RadioSample,
                    classify_rsrp, classify_rsrq, evaluate_handover, path_loss, position_at, sample_cell)
from .scenario import Scenario, ScenarioError, load_bundled, load_scenario, parse_scenario
from .simulation import Simulation, SimulationResult, migration_sweep, run_scenario

__version__ = "0.1.0"
