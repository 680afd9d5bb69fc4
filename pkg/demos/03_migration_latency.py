"""
Kill-to-started migration latency
=================================

Each migration cordons the source host, kills the pod and lets the
scheduler restart it elsewhere. The start latency is the sum of four
stages: scheduler, network fabric, container runtime, application init.
"""

from mecsim import StartLatencyModel, migration_sweep, summarize
from mecsim.metrics import ecdf

# %%
# Fixed stage delays reproduce a single deterministic number.
(rec,) = migration_sweep([0], StartLatencyModel.fixed(0.5, 0.5, 1.0, 2.45))
print("fixed stages:", round(rec.migration_latency, 3), "s", rec.components)

# %%
# The calibrated model draws each stage from a lognormal; sweep 1000 seeds.
records = migration_sweep(range(1000))
lat = [r.migration_latency for r in records]
s = summarize(lat)
print(f"n={s.n} min={s.min:.3f} mean={s.mean:.3f} p95={s.p95:.3f} max={s.max:.3f}")

# %%
# Where does the time go? Mean of each stage across the sweep.
for stage in ("scheduler", "fabric", "container", "app_init"):
    print(f"  {stage:10s} {sum(r.components[stage] for r in records) / len(records):.3f} s")

# %%
# A few ECDF points.
pts = ecdf(lat)
for q in (0.1, 0.5, 0.9, 0.99):
    print(f"  F(x) >= {q}: x = {next(x for x, f in pts if f >= q):.3f} s")
