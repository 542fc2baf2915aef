"""Eguchi-Hanson curvature profile and its total c2 mass.

Run: python3 demos/eh_curvature.py [a]
"""
import sys

import numpy as np

from alelab.ale import eh_triple
from alelab.chern import c2_density_real
from alelab.integrate import eh_c2_cumulative, tail_extrapolate

a = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
tri = eh_triple(a)

direction = np.array([0.3, -0.5, 0.7, 0.1])
direction /= np.linalg.norm(direction)
print(f"{'r/a':>8} {'|Rm|^2 exact':>14} {'c2 density':>14}")
for r in a * np.array([0.5, 1.0, 2.0, 5.0, 20.0]):
    c2 = c2_density_real(tri, (r * direction)[None])[0]
    print(f"{r / a:8.2f} {tri.rm_norm2_exact(r):14.6e} {c2:14.6e}")

radii = a * np.array([20.0, 40.0, 80.0])
cum = eh_c2_cumulative(a, radii)
print("cumulative c2:", ", ".join(f"{v:.12f}" for v in cum))
print("extrapolated total:", tail_extrapolate(radii, cum, 8))
