"""``mecsim run | summarize | replay``."""
from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from .engine import parse_trace
from .export import read_summary, write_outputs
from .scenario import BUNDLED, ScenarioError, bundled_scenario_path, load_scenario
from .simulation import run_scenario


def _resolve_scenario(arg: str) -> Path:
    p = Path(arg)
    if not p.exists() and arg in BUNDLED:
        return bundled_scenario_path(arg)
    return p


def cmd_run(args) -> int:
    path = _resolve_scenario(args.scenario)
    try:
        scenario = load_scenario(path)
    except FileNotFoundError:
        print(f"error: scenario file not found: {path}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be a 64-bit unsigned integer", file=sys.stderr)
        return 2
    result = run_scenario(scenario, seed=args.seed)
    write_outputs(result, args.out)
    ok = sum(1 for r in result.migrations if r.outcome and r.outcome.value == "Completed")
    print(f"{len(result.handovers)} handover(s), {ok}/{len(result.migrations)} migration(s) completed; "
          f"outputs in {args.out}")
    return 0


def cmd_summarize(args) -> int:
    try:
        rows = read_summary(args.path)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{'label':<20} {'n':>5} {'min':>10} {'max':>10} {'mean':>10} {'p95':>10}")
    for r in rows:
        vals = [r[k] if r[k] == "-" else f"{float(r[k]):.4f}" for k in ("min", "max", "mean", "p95")]
        print(f"{r['label']:<20} {r['n']:>5} " + " ".join(f"{v:>10}" for v in vals))
    return 0


def cmd_replay(args) -> int:
    try:
        records = parse_trace(Path(args.trace).read_text())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for a, b in zip(records, records[1:]):
        if b.fire_at < a.fire_at:
            print(f"error: clock decreases at t={b.fire_at:.6f}", file=sys.stderr)
            return 1
    counts = Counter(r.kind for r in records)
    end = records[-1].fire_at if records else 0.0
    print(f"{len(records)} events, last at t={end:.6f}")
    for kind, n in sorted(counts.items()):
        print(f"  {kind:<16} {n}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mecsim", description="Reactive MEC service migration simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and export datasets")
    run.add_argument("scenario", help="scenario YAML file, or a bundled name: " + ", ".join(BUNDLED))
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.set_defaults(func=cmd_run)
    sm = sub.add_parser("summarize", help="print summary.csv of a run directory")
    sm.add_argument("path")
    sm.set_defaults(func=cmd_summarize)
    rp = sub.add_parser("replay", help="check and tally a trace file")
    rp.add_argument("trace")
    rp.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
