"""Horizontal geodesics project to loops on S^2 whose holonomy is the fiber gap.

Run: python3 demos/03_hopf.py
"""
import numpy as np

from s3sr import geodesics, hopf
from s3sr.core import IDENTITY

# The B = 0 geodesic to (-1, 0, 0, 0) projects to a great circle; lifting it
# back horizontally ends half way round the fiber.
s = np.linspace(0, np.pi, 1001)
x = geodesics.const_geodesic(IDENTITY, 0.0, s)
u = hopf.hopf_map(x)
u[-1] = u[0]
loop = hopf.LoopOnS2(s / np.pi, u)
res = hopf.holonomy(loop, IDENTITY)
print(f"great circle: length {res.length:.6f}, holonomy {res.angle:.10f} (pi = {np.pi:.10f})")
print("lift vs original geodesic:", np.abs(res.lift.x - x).max())

# Shortest loops with prescribed holonomy omega: length 2 sqrt(omega (2 pi - omega)).
for om in (0.5, 1.0, np.pi / 2, 3.0):
    sl = hopf.shortest_loop_with_holonomy(om, samples=1001)
    print(f"omega = {om:.4f}: loop length {sl.holonomy.length:.6f}"
          f"  expected {2 * np.sqrt(om * (2 * np.pi - om)):.6f}"
          f"  holonomy {sl.holonomy.angle:.8f}")
