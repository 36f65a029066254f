"""Hopf fibration S^3 -> S^2, horizontal lifts and holonomy.

The projection is ``h(q) = q i q*`` and the structure group acts on the right,
``q -> q o e^{it}``. Horizontal means tangent to span{X, Y}; the differential
of ``h`` maps that plane isometrically up to a factor 2 onto ``T S^2``.
"""
import csv
import io
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from . import integrator
from .core import _frame, _mul, as_point, quat_conj
from .errors import (BasePointMismatch, DomainError, EmptyInput, InputError,
                     NonUnitInput, NumericalError, ResolutionTooCoarse,
                     StepSizeUnderflow)

MAX_CHORD = 0.05
CLOSE_TOL = 1e-10
BASE_TOL = 1e-8
LIFT_TOL = 1e-6
LIFT_RTOL = 1e-11
LIFT_ATOL = 1e-13
HOLONOMY_TOL = 1e-8
LIFT_MAX_STEP = 0.05
LOOP_COLUMNS = ("t", "u1", "u2", "u3")


class S2Point(NamedTuple):
    u1: float
    u2: float
    u3: float

    @classmethod
    def of(cls, u, tol=1e-12):
        u = as_s2(u, tol)
        return cls(*(float(v) for v in u))


def as_s2(u, tol=1e-12):
    u = np.asarray(u, dtype=float)
    if u.shape[-1:] != (3,):
        raise NonUnitInput(f"expected trailing dimension 3, got shape {u.shape}")
    dev = np.abs(np.einsum("...i,...i->...", u, u) - 1.0)
    if np.any(dev > tol):
        raise NonUnitInput(f"point off the unit 2-sphere by {float(np.max(dev)):.3e}")
    return u


def _h(x):
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    return np.stack([x1 * x1 + x2 * x2 - x3 * x3 - x4 * x4,
                     2 * (x1 * x4 + x2 * x3),
                     2 * (x2 * x4 - x1 * x3)], axis=-1)


def _dh(x, v):
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    v1, v2, v3, v4 = np.moveaxis(v, -1, 0)
    return 2 * np.stack([x1 * v1 + x2 * v2 - x3 * v3 - x4 * v4,
                         x1 * v4 + x4 * v1 + x2 * v3 + x3 * v2,
                         x2 * v4 + x4 * v2 - x1 * v3 - x3 * v1], axis=-1)


def hopf_map(x):
    """``h(x) = (x1^2 + x2^2 - x3^2 - x4^2, 2(x1 x4 + x2 x3), 2(x2 x4 - x1 x3))``."""
    return _h(as_point(x))


def hopf_differential(x, v):
    """``dh_x(v)``, the derivative of :func:`hopf_map` at ``x`` along ``v``."""
    return _dh(as_point(x), np.asarray(v, dtype=float))


def circle_action(q, t):
    """Right action ``q o (cos t, sin t, 0, 0)``; ``t`` broadcasts against ``q``."""
    q = as_point(q)
    t = np.asarray(t, dtype=float)
    g = np.stack([np.cos(t), np.sin(t), np.zeros_like(t), np.zeros_like(t)], axis=-1)
    return _mul(q, g)


def bundle_metric_matrix(eta):
    """Round metric in ``(xi1, xi2, eta)`` ordered as ``(eta, xi1, xi2)``: diag(1, cos^2, sin^2)."""
    if not 0.0 <= eta <= np.pi / 2:
        raise DomainError("eta must lie in [0, pi/2]")
    return np.diag([1.0, math.cos(eta) ** 2, math.sin(eta) ** 2])


# --- loops ------------------------------------------------------------------

def _slerp(a, b, f):
    ang = math.acos(min(1.0, max(-1.0, float(a @ b))))
    if ang < 1e-15:
        return np.outer(1 - f, a) + np.outer(f, b)
    return (np.outer(np.sin((1 - f) * ang), a) + np.outer(np.sin(f * ang), b)) / math.sin(ang)


@dataclass
class LoopOnS2:
    """Samples ``u[i]`` of a curve on S^2 at increasing parameters ``t[i]`` in [0, 1].

    Open curves are allowed for lifting; holonomy needs ``closed``.
    """
    t: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.u = as_s2(np.atleast_2d(np.asarray(self.u, dtype=float)))
        if self.t.size == 0:
            raise EmptyInput("no samples")
        if self.t.shape[0] != self.u.shape[0]:
            raise InputError("t and u lengths differ")
        if self.t[0] != 0.0 or (self.t.size > 1 and self.t[-1] != 1.0):
            raise InputError("parameter must run from 0 to 1")
        if np.any(np.diff(self.t) <= 0):
            raise InputError("parameter must be strictly increasing")

    @classmethod
    def from_points(cls, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        t = np.linspace(0.0, 1.0, u.shape[0]) if u.shape[0] > 1 else np.zeros(1)
        return cls(t, u)

    @property
    def closed(self):
        return bool(np.max(np.abs(self.u[0] - self.u[-1])) <= CLOSE_TOL)

    def max_chord(self):
        if len(self.t) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(np.diff(self.u, axis=0), axis=1)))

    def refined(self, max_chord=MAX_CHORD):
        """Insert great-circle points so that no chord exceeds ``max_chord``."""
        if self.max_chord() <= max_chord:
            return self
        ts, us = [self.t[:1]], [self.u[:1]]
        for i in range(len(self.t) - 1):
            a, b = self.u[i], self.u[i + 1]
            m = max(1, int(math.ceil(np.linalg.norm(b - a) / max_chord)))
            f = np.arange(1, m + 1) / m
            ts.append(self.t[i] + f * (self.t[i + 1] - self.t[i]))
            us.append(_slerp(a, b, f))
        u = np.concatenate(us)
        u /= np.linalg.norm(u, axis=1)[:, None]
        return LoopOnS2(np.concatenate(ts), u)

    def curve(self):
        """Smooth interpolant ``c(t)`` with derivative; returns ``(c, c_dot)`` callables."""
        y = self.u.copy()
        bc = "not-a-knot"
        if self.closed and len(self.t) > 3:
            y[-1] = y[0]
            bc = "periodic"
        if len(self.t) < 4:
            sp = CubicSpline(self.t, y, bc_type="natural") if len(self.t) > 2 else None
        else:
            sp = CubicSpline(self.t, y, bc_type=bc)
        if sp is None:
            # two samples: great-circle arc
            a, b = y[0], y[-1]
            return (lambda t: _slerp(a, b, np.atleast_1d(t)).squeeze(),
                    lambda t: _slerp_dot(a, b, np.atleast_1d(t)).squeeze())
        dsp = sp.derivative()

        def c(t):
            s = sp(t)
            return s / np.linalg.norm(s, axis=-1, keepdims=True)

        def c_dot(t):
            s, ds = sp(t), dsp(t)
            n = np.linalg.norm(s, axis=-1, keepdims=True)
            cc = s / n
            return (ds - cc * np.sum(cc * ds, axis=-1, keepdims=True)) / n

        return c, c_dot

    def length(self):
        """Riemannian length of the interpolated curve (Gauss-Legendre per knot interval)."""
        if len(self.t) < 2:
            return 0.0
        _, c_dot = self.curve()
        xg, wg = np.polynomial.legendre.leggauss(8)
        a, b = self.t[:-1, None], self.t[1:, None]
        tt = 0.5 * (b - a) * xg + 0.5 * (a + b)
        sp = np.linalg.norm(c_dot(tt.ravel()), axis=-1).reshape(tt.shape)
        return float(np.sum(0.5 * (b - a) * sp * wg))

    def to_csv(self, fh=None):
        from .hamiltonian import write_csv
        return write_csv(LOOP_COLUMNS, np.column_stack([self.t, self.u]), fh)


def _slerp_dot(a, b, f):
    ang = math.acos(min(1.0, max(-1.0, float(a @ b))))
    if ang < 1e-15:
        return np.tile(b - a, (len(f), 1))
    return ang * (np.outer(-np.cos((1 - f) * ang), a) + np.outer(np.cos(f * ang), b)) / math.sin(ang)


def read_loop_csv(fh):
    """Parse ``t,u1,u2,u3`` rows (header optional) into a :class:`LoopOnS2`."""
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    rows = []
    for row in csv.reader(fh):
        if not row or row[0].strip().startswith("#"):
            continue
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            if rows:
                raise InputError(f"bad loop row: {row}")
            continue  # header
    if not rows:
        raise EmptyInput("loop file has no samples")
    arr = np.array(rows)
    if arr.shape[1] != 4:
        raise InputError("loop rows need 4 columns t,u1,u2,u3")
    return LoopOnS2(arr[:, 0], arr[:, 1:])


# --- lift and holonomy ---------------------------------------------------------

@dataclass
class Lift:
    t: np.ndarray
    x: np.ndarray
    residual: float  # max |h(gamma(t_i)) - c(t_i)| over the loop samples
    max_c: float     # max |vertical frame coefficient| of the lift velocity


def _lift_rhs(c_dot):
    def f(t, g):
        fr = _frame(g)
        M = np.stack([_dh(g, fr.X), _dh(g, fr.Y)], axis=-1)  # 3 x 2
        ab = np.linalg.solve(M.T @ M, M.T @ c_dot(t))
        return ab[0] * fr.X + ab[1] * fr.Y
    return f


def horizontal_lift(loop, x0, rtol=LIFT_RTOL, atol=LIFT_ATOL, refine=True,
                    max_chord=MAX_CHORD, lift_tol=LIFT_TOL):
    """Horizontal lift of ``loop`` through ``x0``, sampled at the loop parameters.

    At each stage the velocity ``a X + b Y`` solves the least-squares system
    ``dh(a X + b Y) = c_dot``, which is exact because ``dh`` maps span{X, Y}
    onto the tangent plane of S^2.
    """
    x0 = as_point(x0, 1e-12)
    if not isinstance(loop, LoopOnS2):
        loop = LoopOnS2.from_points(loop)
    mis = float(np.max(np.abs(_h(x0) - loop.u[0])))
    if mis > BASE_TOL:
        raise BasePointMismatch(f"h(x0) differs from c(0) by {mis:.3e}")
    if loop.max_chord() > max_chord:
        if not refine:
            raise ResolutionTooCoarse(f"max chord {loop.max_chord():.3e} above {max_chord}")
        loop = loop.refined(max_chord)
    if len(loop.t) == 1:
        return Lift(loop.t, x0[None, :], mis, 0.0)
    c, c_dot = loop.curve()
    f = _lift_rhs(c_dot)
    try:
        sol = integrator.solve(f, 0.0, x0, 1.0, rtol=rtol, atol=atol,
                               max_step=LIFT_MAX_STEP, t_eval=loop.t)
    except StepSizeUnderflow as e:
        raise ResolutionTooCoarse(f"lift integration failed: {e}") from e
    x = sol.y
    # the ODE itself is not projected; only the reported samples are put back on S^3
    drift = float(np.max(np.abs(np.linalg.norm(x, axis=1) - 1.0)))
    x = x / np.linalg.norm(x, axis=1)[:, None]
    res = max(float(np.max(np.abs(_h(x) - loop.u))), drift)
    vel = np.array([f(t, g) for t, g in zip(loop.t, x)])
    fr = _frame(x)
    max_c = float(np.max(np.abs(np.sum(vel * fr.Z, axis=-1))))
    if res > lift_tol:
        raise ResolutionTooCoarse(f"lift residual {res:.3e} above {lift_tol:.1e}")
    return Lift(loop.t, x, res, max_c)


@dataclass(frozen=True)
class HolonomyElement:
    angle: float  # in [0, 2 pi)

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % (2 * np.pi))

    def compose(self, other):
        return HolonomyElement(self.angle + other.angle)

    __mul__ = compose

    @property
    def element(self):
        return complex(math.cos(self.angle), math.sin(self.angle))


@dataclass
class HolonomyResult:
    holonomy: HolonomyElement
    lift: Lift
    fiber_residual: float  # distance of gamma(1) from the fiber through x0
    length: float

    @property
    def angle(self):
        return self.holonomy.angle

    @property
    def lift_residual(self):
        return max(self.lift.residual, self.fiber_residual)

    def to_dict(self):
        return {"angle": self.angle, "lift_residual": self.lift_residual,
                "length": self.length}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def fiber_angle(x0, x1):
    """Angle ``t`` with ``x1 = x0 o e^{it}``, plus the off-fiber residual."""
    g = _mul(quat_conj(as_point(x0, 1e-9)), as_point(x1, 1e-9))
    return float(np.arctan2(g[1], g[0])) % (2 * np.pi), float(math.hypot(g[2], g[3]))


def holonomy(loop, x0, **kw):
    """Holonomy of a closed loop on S^2 at ``x0`` over ``loop.u[0]``."""
    if not isinstance(loop, LoopOnS2):
        loop = LoopOnS2.from_points(loop)
    if not loop.closed:
        raise InputError("holonomy needs a closed loop (first = last to 1e-10)")
    lift = horizontal_lift(loop, x0, **kw)
    ang, off = fiber_angle(x0, lift.x[-1])
    return HolonomyResult(HolonomyElement(ang), lift, off, loop.length())


def project_path(points):
    """Hopf image of sampled S^3 points."""
    return hopf_map(np.atleast_2d(points))


@dataclass
class ShortestLoop:
    loop: LoopOnS2
    s_arc: float
    paper_length: float
    n: int
    B: float
    holonomy: HolonomyResult

    def to_dict(self):
        return {"s_arc": self.s_arc, "paper_length": self.paper_length, "n": self.n,
                "B": self.B, "length": self.holonomy.length, **{
                    k: v for k, v in self.holonomy.to_dict().items() if k != "length"}}


def shortest_loop_with_holonomy(omega, samples=4001, n_max=2):
    """Shortest projected geodesic loop through (1, 0, 0) whose lift has holonomy ``omega``.

    Candidates are the fiber-reaching geodesics from the identity; the one
    with least arc parameter is projected and its lift re-checked. For
    ``omega > 0`` the minimum is ``n = 1``; ``omega = 0`` needs the full
    great circle, ``n = 2``.
    """
    from .connect import enumerate_to_fiber
    from .geodesics import GeodesicParam, geodesic_bc

    sols = enumerate_to_fiber(omega, n_max)
    best = min(sols, key=lambda g: g.s_arc)
    s = np.linspace(0.0, best.s_arc, samples)
    x = geodesic_bc(GeodesicParam(best.B, best.theta), s)
    u = _h(x)
    u /= np.linalg.norm(u, axis=1)[:, None]
    u[-1] = u[0]
    loop = LoopOnS2(s / best.s_arc, u)
    hol = holonomy(loop, np.array([1.0, 0.0, 0.0, 0.0]))
    d = abs((hol.angle - omega + np.pi) % (2 * np.pi) - np.pi)
    if d > HOLONOMY_TOL:
        raise NumericalError(f"lift holonomy off by {d:.3e}")
    return ShortestLoop(loop, best.s_arc, best.paper_length, best.branch_index, best.B, hol)
