"""Fibre integral sweep for the A1 family xy = z^2 + t after the base change t = s^2.

Run: python3 demos/holder_sweep.py [n_points]
"""
import sys

from alelab.ade import make_path
from alelab.experiments import default_grid, sweep_F

n = int(sys.argv[1]) if len(sys.argv) > 1 else 8
path = make_path("A", 1, {1: [(1, 0), (-1, 0)]}, d=2)
res = sweep_F(path, "cscK", grid=default_grid("cscK", 1, n=n))

print(f"limit F(0+) = {res.limit:.10f}")
for t, F in zip(res.t, res.F):
    print(f"  s = {t:.3e}   F = {F:.10f}   F - F(0+) = {F - res.limit:+.3e}")
if res.fit is not None:
    print(f"exponent in s: {res.fit.gamma:.4f}   in t: {res.gamma_base:.4f}   (residual {res.fit.residual:.3g})")
else:
    print(res.status)
