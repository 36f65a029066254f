"""Geodesics from the identity: closed forms against the Hamiltonian flow.

Run: python3 demos/01_geodesics.py
"""
import numpy as np

from s3sr import core, geodesics, hamiltonian
from s3sr.core import IDENTITY

# A geodesic from the identity is fixed by the vertical momentum B and a
# heading theta in the horizontal plane. B = 0 gives a great circle.
p = geodesics.GeodesicParam(B=1.0, theta=0.0)
s = np.linspace(0, 2 * np.pi, 9)
x = geodesics.geodesic_bc(p, s)
print("B = 1 geodesic, first samples:")
for si, xi in zip(s[:4], x[:4]):
    print(f"  s = {si:5.3f}  x = {np.array2string(xi, precision=4, suppress_small=True)}")

# it meets the vertical circle through the identity again at k s = pi, k = sqrt(2)
z, w = geodesics.geodesic_zw(1.0, 0.0, np.pi / np.sqrt(2))
print(f"\nat s = pi/sqrt(2): |w| = {abs(w):.1e}, z = {z:.6f}")

# the velocity never picks up a Z component
v = geodesics.geodesic_velocity(p, s)
print("max |<v, Z>| along the curve:", np.abs(core.frame_coeffs(x, v).c).max())

# same curve from the canonical equations
tr = hamiltonian.integrate(IDENTITY, p.initial_covector(), 2 * np.pi, s_eval=s)
print("\nintegrator vs closed form:", np.abs(tr.x - x).max())
print("monitor maxima:", {k: f"{v:.1e}" for k, v in tr.max_monitors().items()})

# the hyperspherical chart describes the same family
hp = geodesics.HyperGeodesicParam.from_cartesian(1.0, 0.0)
hx = geodesics.from_hyper(geodesics.geodesic_hyper(hp, s))
print("chart closed form vs Cartesian:", np.abs(hx - x).max())
