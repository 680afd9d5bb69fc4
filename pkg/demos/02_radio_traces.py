"""
RSRP / RSRQ along a walk between two cells
==========================================

Log-distance path loss turns a UE position into per-cell RSRP, and the
share of total received power gives RSRQ. This mirrors the kind of
dataset a drive test records, with a quality label on each reading.
"""

import numpy as np

from mecsim import BaseStation, MobilityTrace, PathLossModel, classify_rsrp, classify_rsrq, position_at
from mecsim.radio import measure_cells

cells = [BaseStation(1, (0.0, 0.0)), BaseStation(2, (500.0, 0.0))]
walk = MobilityTrace(((0.0, (50.0, 0.0)), (120.0, (450.0, 0.0))))

# %%
# Deterministic propagation (no shadowing).
model = PathLossModel(pl0_db=30.0, exponent=3.5)
for t in np.arange(0, 121, 20):
    a, b = measure_cells(position_at(walk, t), cells, t, model)
    row = "   ".join(f"cell{s.cell_id} {s.rsrp:6.1f} dBm ({classify_rsrp(s.rsrp).value:9s}) "
                       f"{s.rsrq:5.1f} dB ({classify_rsrq(s.rsrq).value:9s})" for s in (a, b))
    print(f"t={t:5.0f}s  {row}")

# %%
# Add 4 dB lognormal shadowing; the crossover smears out.
rng = np.random.default_rng(0)
shadowed = PathLossModel(shadow_sigma_db=4.0)
diff = [np.subtract(*[s.rsrp for s in measure_cells(position_at(walk, t), cells, t, shadowed, rng)])
        for t in np.arange(50, 70, 0.2)]
print("cell1 - cell2 RSRP around the midpoint: mean %.2f dB, std %.2f dB" % (np.mean(diff), np.std(diff)))
