"""Normal Hamiltonian flow of the sub-Riemannian structure on S^3.

Cartesian phase space is ``(x, xi)`` in R^4 x R^4 with

    H = (<I1 x, xi>^2 + <I2 x, xi>^2) / 2.

The hyperspherical chart ``(xi1, xi2, eta)`` with momenta ``(psi1, psi2, theta)``
uses

    H = (theta^2 + psi1^2 tan^2 eta + psi2^2 cot^2 eta + 2 psi1 psi2) / 2,

which is the cometric of span{X, Y} in the round metric
``d eta^2 + cos^2 eta d xi1^2 + sin^2 eta d xi2^2``.
"""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import integrator
from .core import _coeffs, as_point
from .errors import ChartSingularity, InputError, MonitorBreach

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_MAX_STEP = 0.1
MONITOR_FACTOR = 10.0
CHART_EPS = 1e-8
HYPER_MIN_ETA = 1e-6

CSV_COLUMNS = ("s", "x1", "x2", "x3", "x4", "xi1", "xi2", "xi3", "xi4",
               "a", "b", "c", "H", "norm_drift")


def _rot_j(v):
    # I1 v
    return np.stack([-v[..., 2], -v[..., 3], v[..., 0], v[..., 1]], axis=-1)


def _rot_k(v):
    # I2 v
    return np.stack([-v[..., 3], v[..., 2], -v[..., 1], v[..., 0]], axis=-1)


def _rhs(y):
    x, xi = y[..., :4], y[..., 4:]
    Xx, Yx = _rot_j(x), _rot_k(x)
    p = np.sum(Xx * xi, axis=-1)[..., None]
    q = np.sum(Yx * xi, axis=-1)[..., None]
    return np.concatenate([p * Xx + q * Yx, p * _rot_j(xi) + q * _rot_k(xi)], axis=-1)


def _ham(x, xi):
    p = np.sum(_rot_j(x) * xi, axis=-1)
    q = np.sum(_rot_k(x) * xi, axis=-1)
    return 0.5 * (p * p + q * q)


def hamiltonian_value(x, xi):
    return _ham(as_point(x), np.asarray(xi, dtype=float))


def ham_rhs(x, xi):
    """Return ``(x_dot, xi_dot)`` of the Cartesian Hamiltonian system."""
    x = as_point(x)
    xi = np.asarray(xi, dtype=float)
    d = _rhs(np.concatenate(np.broadcast_arrays(x, xi), axis=-1))
    return d[..., :4], d[..., 4:]


@dataclass
class Trajectory:
    s: np.ndarray
    x: np.ndarray
    xi: np.ndarray
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    norm_drift: np.ndarray = field(repr=False)
    H_drift: np.ndarray = field(repr=False)

    @classmethod
    def from_states(cls, s, y, H0=None):
        s = np.asarray(s, dtype=float)
        x, xi = y[:, :4], y[:, 4:]
        xdot = _rhs(y)[:, :4]
        a, b, c, _ = _coeffs(x, xdot)
        H = _ham(x, xi)
        H0 = H[0] if H0 is None else H0
        return cls(s, x, xi, a, b, c, H,
                   np.abs(np.linalg.norm(x, axis=1) - 1.0), np.abs(H - H0))

    def __len__(self):
        return self.s.size

    @property
    def final(self):
        return self.x[-1]

    def max_monitors(self):
        return {
            "norm_drift": float(self.norm_drift.max()),
            "H_drift": float(self.H_drift.max()),
            "c": float(np.abs(self.c).max()),
        }

    def rows(self):
        cols = [self.s, *self.x.T, *self.xi.T, self.a, self.b, self.c, self.H,
                self.norm_drift]
        return np.column_stack(cols)

    def to_csv(self, fh=None):
        """Write the trajectory as CSV; returns the text when ``fh`` is None."""
        return write_csv(CSV_COLUMNS, self.rows(), fh)


def fmt(v):
    return format(float(v), ".17g")


def write_csv(columns, rows, fh=None):
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    if fh is None:
        return buf.getvalue()
    return None


def _check_monitors(traj, rtol, atol):
    # Global error grows with arc length, so the 10x budget is per unit of s.
    limit = MONITOR_FACTOR * max(rtol, atol) * max(1.0, float(traj.s[-1]))
    xi_scale = max(1.0, float(np.linalg.norm(traj.xi[0])))
    m = traj.max_monitors()
    scale = {"norm_drift": 1.0, "H_drift": xi_scale ** 2, "c": xi_scale}
    bad = {k: v for k, v in m.items() if v > limit * scale[k]}
    if bad:
        raise MonitorBreach("monitor drift above 10x tolerance: " +
                            ", ".join(f"{k}={v:.3e}" for k, v in bad.items()))


def integrate(x0, xi0, s_end, rel_tol=DEFAULT_RTOL, abs_tol=DEFAULT_ATOL,
              max_step=DEFAULT_MAX_STEP, s_eval=None, check=True):
    """Integrate the Cartesian system from ``(x0, xi0)`` over ``[0, s_end]``.

    ``x0``/``xi0`` of shape ``(4,)`` give one :class:`Trajectory`; shape
    ``(n, 4)`` integrates the batch on a shared adaptive mesh and returns a
    list. With ``s_eval`` the samples are taken from the continuous extension,
    otherwise at the accepted steps.
    """
    if s_end < 0:
        raise InputError("s_end must be non-negative")
    x0 = as_point(x0)
    xi0 = np.asarray(xi0, dtype=float)
    x0, xi0 = np.broadcast_arrays(x0, xi0)
    y0 = np.concatenate([x0, xi0], axis=-1)
    sol = integrator.solve(lambda s, y: _rhs(y), 0.0, y0, float(s_end),
                           rtol=rel_tol, atol=abs_tol, max_step=max_step,
                           t_eval=s_eval)
    ys = sol.y
    if y0.ndim == 1:
        trajs = [Trajectory.from_states(sol.t, ys)]
    else:
        trajs = [Trajectory.from_states(sol.t, ys[:, i]) for i in range(y0.shape[0])]
    if check and s_end > 0:
        for tr in trajs:
            _check_monitors(tr, rel_tol, abs_tol)
    return trajs[0] if y0.ndim == 1 else trajs


# --- hyperspherical chart -------------------------------------------------

@dataclass
class HyperPhaseState:
    xi1: float
    xi2: float
    eta: float
    psi1: float
    psi2: float
    theta: float

    def to_array(self):
        return np.array([self.xi1, self.xi2, self.eta, self.psi1, self.psi2, self.theta])

    @classmethod
    def from_array(cls, arr):
        return cls(*(float(v) for v in arr))


def _as_hyper_array(state):
    if isinstance(state, HyperPhaseState):
        return state.to_array()
    return np.asarray(state, dtype=float)


def _hyper_rhs(y):
    xi1, xi2, eta, psi1, psi2, theta = y
    if not (CHART_EPS < eta < np.pi / 2 - CHART_EPS):
        raise ChartSingularity(f"eta = {eta:.3e} at the edge of the chart")
    t, ct = np.tan(eta), 1.0 / np.tan(eta)
    return np.array([
        psi1 * t * t + psi2,
        psi2 * ct * ct + psi1,
        theta,
        0.0,
        0.0,
        -psi1 ** 2 * t / np.cos(eta) ** 2 + psi2 ** 2 * ct / np.sin(eta) ** 2,
    ])


def ham_rhs_hyper(state):
    """Derivatives ``(xi1', xi2', eta', psi1', psi2', theta')`` in the chart."""
    return _hyper_rhs(_as_hyper_array(state))


def hamiltonian_hyper(state):
    xi1, xi2, eta, psi1, psi2, theta = _as_hyper_array(state)
    t = np.tan(eta)
    return 0.5 * (theta ** 2 + psi1 ** 2 * t ** 2 + psi2 ** 2 / t ** 2 + 2 * psi1 * psi2)


@dataclass
class HyperTrajectory:
    s: np.ndarray
    states: np.ndarray  # columns xi1, xi2, eta, psi1, psi2, theta

    @property
    def xi1(self):
        return self.states[:, 0]

    @property
    def xi2(self):
        return self.states[:, 1]

    @property
    def eta(self):
        return self.states[:, 2]

    def points(self):
        """Map the samples to S^3."""
        z = np.exp(1j * self.xi1) * np.cos(self.eta)
        w = np.exp(1j * self.xi2) * np.sin(self.eta)
        return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def integrate_hyper(init, s_end, rel_tol=DEFAULT_RTOL, abs_tol=DEFAULT_ATOL,
                    max_step=DEFAULT_MAX_STEP, s_eval=None, s0=0.0):
    """Integrate the chart system; raises ChartSingularity on leaving the chart.

    ``init`` is the state at parameter ``s0``. The start must satisfy
    ``eta >= 1e-6``; starts on the degenerate torus
    ``eta = 0`` are handled by the closed forms in :mod:`s3sr.geodesics`.
    """
    y0 = _as_hyper_array(init)
    if not (HYPER_MIN_ETA <= y0[2] <= np.pi / 2 - HYPER_MIN_ETA):
        raise ChartSingularity(f"initial eta = {y0[2]:.3e} outside [1e-6, pi/2 - 1e-6]")
    if s_end < s0:
        raise InputError("s_end must not precede s0")
    sol = integrator.solve(lambda s, y: _hyper_rhs(y), float(s0), y0, float(s_end),
                           rtol=rel_tol, atol=abs_tol, max_step=max_step, t_eval=s_eval)
    return HyperTrajectory(sol.t, sol.y)
