import pytest

from mecsim import Engine, Epc, MecHost, MigrationController, Orchestrator, StartLatencyModel


@pytest.fixture
def engine():
    return Engine(seed=1)


@pytest.fixture
def two_hosts(engine):
    """Engine, EPC, orchestrator and controller for the two-cell/two-MEC topology."""
    epc = Epc(engine)
    orch = Orchestrator(engine, [MecHost("mec1", 1), MecHost("mec2", 2)])
    ctl = MigrationController(engine, epc, orch, StartLatencyModel.fixed(0.5, 0.5, 1.0, 2.45),
                              dns_propagation=0.5)
    orch.deploy("video", "mec1")
    return engine, epc, orch, ctl
