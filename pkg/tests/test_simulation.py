import filecmp
import math
from pathlib import Path

import pytest

from mecsim.controller import Outcome
from mecsim.engine import EventKind
from mecsim.export import MIGRATION_HEADER, read_summary, write_outputs
from mecsim.scenario import load_bundled, parse_scenario
from mecsim.simulation import migration_sweep, run_scenario


@pytest.fixture(scope="module")
def paper_walk():
    return run_scenario(load_bundled("paper-walk"))


def test_paper_walk_single_handover(paper_walk):
    r = paper_walk
    assert len(r.handovers) == 1
    (ho,) = r.handovers
    assert (ho.source_cell, ho.target_cell) == (1, 2)
    # handover after the midpoint crossing of a 3 dB margin
    assert 60 < ho.t_requested < 75
    (m,) = r.migrations
    assert m.outcome is Outcome.COMPLETED and (m.src_host, m.dst_host) == ("mec1", "mec2")


def test_serving_cell_switches_at_completion(paper_walk):
    ho = paper_walk.handovers[0]
    before = [s for s in paper_walk.rss if s.serving and s.t < ho.t_requested]
    after = [s for s in paper_walk.rss if s.serving and s.t > ho.t_end_marker]
    assert {s.cell_id for s in before} == {1}
    assert {s.cell_id for s in after} == {2}


def test_rss_has_both_cells_every_tick(paper_walk):
    ticks = {s.t for s in paper_walk.rss}
    assert len(paper_walk.rss) == 2 * len(ticks)
    assert len(ticks) == 601  # 0.0 .. 120.0 every 0.2 s


def test_no_frames_while_disrupted(paper_walk):
    s = paper_walk.session
    (d,), (c,) = s.t_disrupted, s.t_reconnected
    assert not [x for x in s.samples if d <= x.t < c]


def test_outputs_written(paper_walk, tmp_path):
    write_outputs(paper_walk, tmp_path)
    names = {p.name for p in tmp_path.iterdir()}
    for required in ("trace.tsv", "epc.log", "rss.csv", "migrations.csv", "latency.csv", "session.csv",
                     "summary.csv", "handovers.csv", "ecdf_migration_latency.csv", "ecdf_e2e_latency.csv",
                     "ecdf_downtime.csv"):
        assert required in names
    assert (tmp_path / "rss.csv").read_text().splitlines()[0] == "t,cell_id,rsrp_dbm,rsrq_db,serving"
    assert (tmp_path / "migrations.csv").read_text().splitlines()[0] == ",".join(MIGRATION_HEADER)
    assert (tmp_path / "latency.csv").read_text().splitlines()[0] == "t,e2e_s"
    assert (tmp_path / "session.csv").read_text().splitlines() == [
        "event,t", f"disrupted,{paper_walk.session.t_disrupted[0]!r}",
        f"reconnected,{paper_walk.session.t_reconnected[0]!r}"]
    labels = [r["label"] for r in read_summary(tmp_path)]
    assert labels[:3] == ["migration_latency", "e2e_latency", "downtime"]
    ho = (tmp_path / "handovers.csv").read_text().splitlines()
    assert ho[0] == "ue,src_cell,dst_cell,t_requested,t_end_marker"
    assert float(ho[1].split(",")[-1]) == paper_walk.handovers[0].t_end_marker


def test_trace_contains_pipeline_events(paper_walk):
    kinds = {e.kind for e in paper_walk.trace}
    assert kinds == set(EventKind)


def test_no_handover_scenario_has_empty_migration_row(tmp_path):
    r = run_scenario(load_bundled("ping-pong"))
    write_outputs(r, tmp_path)
    row = read_summary(tmp_path)[0]
    assert row == {"label": "migration_latency", "n": "0", "min": "-", "max": "-", "mean": "-", "p95": "-"}
    assert not (tmp_path / "ecdf_migration_latency.csv").exists()


def test_round_trip_two_migrations():
    r = run_scenario(load_bundled("round-trip"))
    assert [(p.source_cell, p.target_cell) for p in r.handovers] == [(1, 2), (2, 1)]
    assert [(m.src_host, m.dst_host) for m in r.migrations] == [("mec1", "mec2"), ("mec2", "mec1")]
    assert len(r.session.downtimes()) == 2


def test_seed_override_changes_draws():
    sc = load_bundled("paper-walk")
    a = run_scenario(sc, seed=1).migrations[0].migration_latency
    b = run_scenario(sc, seed=2).migrations[0].migration_latency
    assert a != b


def test_all_cordoned_deadlock_visible(tmp_path):
    # only one MEC host: after cordoning it there is nowhere to go
    sc = parse_scenario("""\
seed: 3
duration_s: 120
base_stations:
  - {cell_id: 1, position: [0, 0]}
  - {cell_id: 2, position: [500, 0]}
mec_hosts:
  - {host_id: mec1, colocated_cell: 1}
ue:
  waypoints:
    - {t: 0, position: [50, 0]}
    - {t: 120, position: [450, 0]}
""")
    r = run_scenario(sc)
    (m,) = r.migrations
    assert m.outcome is Outcome.FAILED
    assert r.session.t_reconnected == []
    assert r.session.connected_time + r.session.disrupted_time == pytest.approx(120, abs=1e-9)
    write_outputs(r, tmp_path)
    row = (tmp_path / "migrations.csv").read_text().splitlines()[1].split(",")
    assert row[3] == "" and row[-1] == ""


def test_migration_sweep_fixed():
    from mecsim.orchestrator import StartLatencyModel
    recs = migration_sweep(range(3), StartLatencyModel.fixed(0.5, 0.5, 1.0, 2.45))
    assert [r.migration_latency for r in recs] == [pytest.approx(4.45)] * 3
