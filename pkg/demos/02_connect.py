"""How many geodesics join the identity to a given point?

Run: python3 demos/02_connect.py
"""
import numpy as np

from s3sr import connect, geodesics

# Points on the vertical circle (cos w, sin w, 0, 0) are reached by a
# countable family; the even members follow s = sqrt(pi^2 n^2 - w^2).
om = np.pi / 2
print("fiber target, omega = pi/2")
for g in connect.enumerate_to_fiber(om, 4)[:6]:
    print(f"  n = {g.branch_index}  k = {g.winding}  B = {g.B:+.5f}  s = {g.s_arc:.5f}")

# For a generic point the search runs along each arrival-angle branch.
x1 = geodesics.geodesic_bc(geodesics.GeodesicParam(0.7, 0.3), 1.2)
tgt = connect.TargetPoint.from_point(x1)
sols = connect.enumerate_between(tgt, s_max=2 * np.pi)
print(f"\ntarget {np.round(x1, 4)}: {len(sols)} geodesics with s <= 2 pi")
for g in sols:
    print(f"  branch {g.branch_index}/{g.sheet}  B = {g.B:+.6f}  theta = {g.theta:+.6f}"
          f"  s = {g.s_arc:.6f}  residual {g.residual:.1e}")

# An independent sign-change count on a (B, s) grid agrees.
n, _ = connect.brute_force_count(tgt, 1e-3, 2 * np.pi)
print("brute-force count:", n)
