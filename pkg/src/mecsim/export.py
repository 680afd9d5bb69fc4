"""CSV / text exports of a finished run."""
from __future__ import annotations

import csv
import io
from pathlib import Path

from .engine import serialize_trace
from .metrics import ecdf, histogram, summarize
from .simulation import SimulationResult

SUMMARY_HEADER = ["label", "n", "min", "max", "mean", "p95"]
MIGRATION_HEADER = ["service", "ho_request_t", "t_killed", "t_started", "migration_latency_s",
                    "scheduler_d", "fabric_d", "container_d", "appinit_d", "src_host", "dst_host"]
# Always reported, even when empty.
SUMMARY_LABELS = ("migration_latency", "e2e_latency", "downtime")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def rss_csv(result: SimulationResult) -> str:
    return _csv(["t", "cell_id", "rsrp_dbm", "rsrq_db", "serving"],
                ((s.t, s.cell_id, s.rsrp, s.rsrq, s.serving) for s in result.rss))


def handovers_csv(result: SimulationResult) -> str:
    return _csv(["ue", "src_cell", "dst_cell", "t_requested", "t_end_marker"],
                ((p.ue_id, p.source_cell, p.target_cell, p.t_requested, p.t_end_marker)
                 for p in result.handovers))


def migrations_csv(result: SimulationResult) -> str:
    rows = []
    for r in result.migrations:
        c = r.components
        rows.append((r.service_name, r.trigger_log_t, r.t_killed, r.t_started, r.migration_latency,
                     c.get("scheduler"), c.get("fabric"), c.get("container"), c.get("app_init"),
                     r.src_host, r.dst_host))
    return _csv(MIGRATION_HEADER, rows)


def latency_csv(result: SimulationResult) -> str:
    return _csv(["t", "e2e_s"], ((s.t, s.e2e) for s in result.session.samples))


def session_csv(result: SimulationResult) -> str:
    s = result.session
    events = [("disrupted", t) for t in s.t_disrupted] + [("reconnected", t) for t in s.t_reconnected]
    events.sort(key=lambda e: (e[1], e[0] != "disrupted"))
    return _csv(["event", "t"], events)


def sample_sets(result: SimulationResult) -> dict[str, list[float]]:
    s = result.session
    return {
        "migration_latency": [r.migration_latency for r in result.migrations if r.migration_latency is not None],
        "e2e_latency": [x.e2e for x in s.samples],
        "downtime": s.downtimes(),
        "energy_offloaded_j": [s.energy_offloaded()],
        "energy_local_j": [s.energy_local()],
    }


def summary_csv(sets: dict[str, list[float]]) -> str:
    rows = []
    for label, values in sets.items():
        if values:
            sm = summarize(values)
            rows.append((label, sm.n, sm.min, sm.max, sm.mean, sm.p95))
        else:
            rows.append((label, 0, "-", "-", "-", "-"))
    return _csv(SUMMARY_HEADER, rows)


def write_outputs(result: SimulationResult, out_dir: str | Path, bins: int = 20) -> list[Path]:
    """Write every dataset of ``result`` into ``out_dir``; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sets = sample_sets(result)
    files = {
        "trace.tsv": serialize_trace(result.trace),
        "epc.log": result.epc.export_text(),
        "rss.csv": rss_csv(result),
        "handovers.csv": handovers_csv(result),
        "migrations.csv": migrations_csv(result),
        "latency.csv": latency_csv(result),
        "session.csv": session_csv(result),
        "summary.csv": summary_csv(sets),
    }
    for label, values in sets.items():
        if values:
            files[f"ecdf_{label}.csv"] = _csv(["value", "fraction"], ecdf(values))
            files[f"hist_{label}.csv"] = _csv(["left", "right", "count"], histogram(values, bins))
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        written.append(path)
    return written


def read_summary(path: str | Path) -> list[dict[str, str]]:
    """Parse ``summary.csv``; rejects anything without the exact header."""
    p = Path(path)
    if p.is_dir():
        p = p / "summary.csv"
    text = p.read_text()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != SUMMARY_HEADER:
        raise ValueError(f"{p}: not a summary.csv (header {header!r})")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(SUMMARY_HEADER):
            raise ValueError(f"{p}:{lineno}: expected {len(SUMMARY_HEADER)} fields")
        rows.append(dict(zip(SUMMARY_HEADER, row)))
    return rows
