"""
The two-cell walk, end to end
=============================

Run the bundled scenario, export every dataset and read back the summary.
The same thing is available as ``mecsim run paper-walk --out DIR``.
"""

import tempfile
from pathlib import Path

from mecsim import load_bundled, run_scenario
from mecsim.export import read_summary, write_outputs

result = run_scenario(load_bundled("paper-walk"))

# %%
print(result.epc.export_text())

# %%
out = Path(tempfile.mkdtemp())
for path in write_outputs(result, out):
    print(f"{path.name:32s} {path.stat().st_size:8d} bytes")

# %%
for row in read_summary(out):
    print(row)
