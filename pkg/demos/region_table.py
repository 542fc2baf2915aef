"""Per-region decay orders of the glued families, printed as a table.

Run: python3 demos/region_table.py [cscK|K3]
"""
import sys

import numpy as np

from alelab.ade import make_path
from alelab.experiments import region_rate_table

flavor = sys.argv[1] if len(sys.argv) > 1 else "cscK"
path = make_path("A", 1, {1: [(1, 0), (-1, 0)]}, d=2)
# the cscK annuli only reach their asymptotic regime once b is small
grid = 1e-5 * 0.5 ** np.arange(10) if flavor == "cscK" else None

for r in region_rate_table(path, grid, flavor):
    fitted = "-" if r.fitted is None else f"{r.fitted:6.3f}"
    pred = "exact" if r.predicted is None else f"{r.predicted:4.1f}"
    print(f"{r.region:19s} {r.quantity:15s} [{r.variable:7s}] predicted {pred:>5s} fitted {fitted:>6s}  {r.status}")
