"""Closed-form sub-Riemannian geodesics on S^3.

Cartesian family (from the identity, unit speed, C + iD = e^{i theta}):

    z(s) = (cos(k s) + i (B/k) sin(k s)) e^{-i B s}
    w(s) = e^{i theta} (1/k) sin(k s) e^{i B s},        k = sqrt(1 + B^2)

with ``x = (Re z, Im z, Re w, Im w)``. ``B = 0`` gives the great circles of the
horizontal sphere; left translation moves everything to other base points.
"""
import json
from dataclasses import asdict, dataclass

import numpy as np

from .core import I1, I2, I3, IDENTITY, _mul, as_point
from .errors import InputError, InvalidParam
from .hamiltonian import HyperPhaseState, fmt, write_csv


def _wrap(a):
    """Wrap angles to [-pi, pi)."""
    return (np.asarray(a) + np.pi) % (2 * np.pi) - np.pi


def _pack(z, w):
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def _unpack(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]


def const_geodesic(x0, psi, s):
    """Geodesic with constant frame velocity ``(cos psi, sin psi, 0)`` through ``x0``."""
    x0 = as_point(x0)
    s = np.asarray(s, dtype=float)[..., None]
    direction = x0 @ (np.cos(psi) * I1 + np.sin(psi) * I2).T
    return x0 * np.cos(s) + direction * np.sin(s)


def vertical_line(x0, s):
    """Integral curve of Z through ``x0`` (the Hopf fiber)."""
    x0 = as_point(x0)
    s = np.asarray(s, dtype=float)[..., None]
    return x0 * np.cos(s) + (x0 @ I3.T) * np.sin(s)


@dataclass(frozen=True)
class GeodesicParam:
    B: float
    theta: float
    base: tuple = tuple(IDENTITY)

    @property
    def C(self):
        return float(np.cos(self.theta))

    @property
    def D(self):
        return float(np.sin(self.theta))

    @property
    def k(self):
        return float(np.sqrt(1.0 + self.B ** 2))

    def initial_covector(self, A=0.0):
        """Covector ``(A, B, C, D)`` at the identity producing this geodesic."""
        return np.array([A, self.B, self.C, self.D])


def geodesic_zw(B, theta, s):
    """Complex pair ``(z(s), w(s))`` of the family through the identity."""
    s = np.asarray(s, dtype=float)
    k = np.sqrt(1.0 + B * B)
    sn, cs = np.sin(k * s), np.cos(k * s)
    z = (cs + 1j * (B / k) * sn) * np.exp(-1j * B * s)
    w = np.exp(1j * theta) * (sn / k) * np.exp(1j * B * s)
    return z, w


def geodesic_zw_dot(B, theta, s):
    """Derivatives ``(z'(s), w'(s))``; the speed ``|z'|^2 + |w'|^2`` is 1."""
    s = np.asarray(s, dtype=float)
    k = np.sqrt(1.0 + B * B)
    sn, cs = np.sin(k * s), np.cos(k * s)
    zd = -(sn / k) * np.exp(-1j * B * s)
    wd = np.exp(1j * theta) * (cs + 1j * (B / k) * sn) * np.exp(1j * B * s)
    return zd, wd


def geodesic_bc(param, s):
    """Point(s) of the closed-form geodesic ``param`` at ``s``.

    A base point other than the identity is applied by left translation.
    """
    x = _pack(*geodesic_zw(param.B, param.theta, s))
    base = np.asarray(param.base, dtype=float)
    if np.array_equal(base, IDENTITY):
        return x
    return _mul(as_point(base), x)


def geodesic_velocity(param, s):
    return _pack(*geodesic_zw_dot(param.B, param.theta, s))


def geodesic_covector(param, s, A=0.0):
    """Momentum along the geodesic recovered from the two first integrals.

    ``phi = z (A + iB) - conj(w) (C + iD)`` and
    ``psi = conj(z) (C + iD) + w (A + iB)`` give ``xi = (phi, psi)``.
    """
    z, w = geodesic_zw(param.B, param.theta, s)
    ab = A + 1j * param.B
    cd = np.exp(1j * param.theta)
    phi = z * ab - np.conj(w) * cd
    psi = np.conj(z) * cd + w * ab
    return _pack(phi, psi)


def geodesic_from(x0, B, theta, s):
    """Left translate of the closed-form geodesic to start at ``x0``."""
    x0 = as_point(x0)
    return _mul(x0, geodesic_bc(GeodesicParam(B, theta), s))


def riccati_p(B, theta, s):
    """Closed-form solution of ``p' = (C + iD) p^2 - 2iB p + (C - iD)``, ``p(0) = 0``."""
    s = np.asarray(s, dtype=float)
    k = np.sqrt(1.0 + B * B)
    sn, cs = np.sin(k * s), np.cos(k * s)
    return np.exp(-1j * theta) * sn / (k * cs + 1j * B * sn)


# --- hyperspherical chart -------------------------------------------------

@dataclass
class HyperCoords:
    """``x1 + i x2 = e^{i xi1} cos eta``, ``x3 + i x4 = e^{i xi2} sin eta``."""
    xi1: np.ndarray
    xi2: np.ndarray
    eta: np.ndarray

    def point(self):
        return from_hyper(self)

    def canonical(self):
        """Same point(s) with eta in [0, pi/2] and angles in [-pi, pi)."""
        return to_hyper(self.point())


def to_hyper(x):
    """Chart coordinates of ``x``; the absent angle on a degenerate torus is 0."""
    z, w = _unpack(x)
    eta = np.arctan2(np.abs(w), np.abs(z))
    xi1 = np.where(np.abs(z) > 0, _wrap(np.angle(z)), 0.0)
    xi2 = np.where(np.abs(w) > 0, _wrap(np.angle(w)), 0.0)
    return HyperCoords(xi1, xi2, eta)


def from_hyper(h):
    z = np.exp(1j * np.asarray(h.xi1)) * np.cos(h.eta)
    w = np.exp(1j * np.asarray(h.xi2)) * np.sin(h.eta)
    return _pack(z, w)


@dataclass(frozen=True)
class HyperGeodesicParam:
    """Chart geodesic leaving the fiber ``eta = 0`` with ``eta'(0) = eta_dot0``.

    ``psi1`` is the conserved momentum conjugate to ``xi1`` (``psi2 = 0`` by
    horizontality); ``xi2_0`` is the initial heading.
    """
    psi1: float
    eta_dot0: float
    xi2_0: float = 0.0

    def __post_init__(self):
        if not self.eta_dot0 > 0:
            raise InvalidParam("eta_dot0 must be positive")

    @property
    def C(self):
        return self.eta_dot0 ** 2 + self.psi1 ** 2

    @property
    def speed(self):
        return self.eta_dot0

    @classmethod
    def from_cartesian(cls, B, theta, speed=1.0):
        """Chart parameters of the Cartesian geodesic ``(B, theta)`` run at ``speed``."""
        return cls(psi1=B * speed, eta_dot0=speed, xi2_0=theta)


def _continuous_arctan_tan(a, t):
    """Branch of ``arctan(a tan t)`` continuous in ``t`` (a >= 0), equal to 0 at t = 0."""
    f = np.arctan2(a * np.sin(t), np.cos(t))
    return f + 2 * np.pi * np.round((t - f) / (2 * np.pi))


def geodesic_hyper(param, s):
    """Chart coordinates along the geodesic, as a continuous lift in ``s``.

    The angles are not wrapped and ``eta`` is signed (its sine follows
    ``sin(sqrt(C) s)``), so that ``xi2 = xi2_0 + psi1 s`` holds exactly for
    all ``s``. Use :meth:`HyperCoords.canonical` for chart-domain values.
    """
    s = np.asarray(s, dtype=float)
    C = param.C
    if not C > param.psi1 ** 2:
        raise InvalidParam("need C > psi1^2")
    rc = np.sqrt(C)
    psi1 = param.psi1
    xi2 = param.xi2_0 + psi1 * s
    if psi1 == 0.0:
        return HyperCoords(np.zeros_like(s), xi2, rc * s)
    amp = np.sqrt((C - psi1 ** 2) / C)
    eta = np.arcsin(amp * np.sin(rc * s))
    xi1 = -psi1 * s + np.sign(psi1) * _continuous_arctan_tan(abs(psi1) / rc, rc * s)
    return HyperCoords(xi1, xi2, eta)


def hyper_phase_state(param, s):
    """Full chart phase state on the closed form at ``s`` (for starting integrate_hyper)."""
    h = geodesic_hyper(param, s)
    C = param.C
    rc = np.sqrt(C)
    if param.psi1 == 0.0:
        eta_dot = rc
    else:
        amp = np.sqrt((C - param.psi1 ** 2) / C)
        eta_dot = amp * rc * np.cos(rc * s) / np.cos(h.eta)
    return HyperPhaseState(float(h.xi1), float(h.xi2), float(h.eta),
                           param.psi1, 0.0, float(eta_dot))


def fiber_family_hyper(omega, n, k):
    """Chart geodesic on the unit interval from the identity to ``(cos w, sin w, 0, 0)``.

    Closing on the fiber at ``s = 1`` forces ``C = pi^2 n^2``; the momentum is
    ``psi1 = pi n - omega - 2 pi k`` (the arrival angle congruence). Returns
    ``(param, length)`` where the length equals the constant speed.
    """
    if n < 1:
        raise InputError("n must be a positive integer")
    psi1 = np.pi * n - omega - 2 * np.pi * k
    if not abs(psi1) < np.pi * n:
        raise InvalidParam("winding k incompatible with n for this omega")
    speed = float(np.sqrt(np.pi ** 2 * n ** 2 - psi1 ** 2))
    return HyperGeodesicParam(psi1=float(psi1), eta_dot0=speed), speed


# --- sampling and serialization --------------------------------------------

SAMPLE_COLUMNS = ("s", "x1", "x2", "x3", "x4")


@dataclass
class GeodesicSamples:
    kind: str
    params: dict
    s: np.ndarray
    x: np.ndarray

    def to_csv(self, fh=None):
        return write_csv(SAMPLE_COLUMNS, np.column_stack([self.s, self.x]), fh)

    def to_json(self):
        doc = {
            "kind": self.kind,
            "params": self.params,
            "columns": list(SAMPLE_COLUMNS),
            "samples": [[float(fmt(v)) for v in row]
                        for row in np.column_stack([self.s, self.x])],
        }
        return json.dumps(doc, indent=2)


def sample(kind="bc", s_end=np.pi, n=201, B=0.0, theta=0.0, psi=0.0,
           base=IDENTITY, psi1=0.0, eta_dot0=1.0):
    """Sample one of the closed forms on ``n`` equally spaced parameters in ``[0, s_end]``.

    ``kind`` is ``"bc"`` (B, theta family, left translated to ``base``),
    ``"const"`` (constant frame velocity with heading ``psi``), ``"vertical"``
    or ``"hyper"`` (chart family with ``psi1``, ``eta_dot0``, heading ``theta``).
    """
    if n < 1:
        raise InputError("need at least one sample")
    s = np.linspace(0.0, s_end, n)
    base = as_point(base)
    if kind == "bc":
        x = geodesic_from(base, B, theta, s)
        params = {"B": B, "theta": theta, "base": list(map(float, base))}
    elif kind == "const":
        x = const_geodesic(base, psi, s)
        params = {"psi": psi, "base": list(map(float, base))}
    elif kind == "vertical":
        x = vertical_line(base, s)
        params = {"base": list(map(float, base))}
    elif kind == "hyper":
        p = HyperGeodesicParam(psi1, eta_dot0, theta)
        x = from_hyper(geodesic_hyper(p, s))
        params = asdict(p) | {"C": p.C}
    else:
        raise InputError(f"unknown geodesic kind {kind!r}")
    return GeodesicSamples(kind, params, s, x)


__all__ = [
    "GeodesicParam", "GeodesicSamples", "HyperCoords",
    "HyperGeodesicParam", "const_geodesic", "fiber_family_hyper", "from_hyper",
    "geodesic_bc", "geodesic_covector", "geodesic_from", "geodesic_hyper",
    "geodesic_velocity", "geodesic_zw", "geodesic_zw_dot", "hyper_phase_state",
    "riccati_p", "sample", "to_hyper", "vertical_line",
]
