"""Geodesics from the identity to a prescribed point.

A geodesic ``(B, theta)`` reaches the target ``z1 = r e^{i alpha}``,
``w1 = rho e^{i phi}`` at arc parameter ``s`` when

    |sin(k s)| / k = rho,     arg z(s) = alpha  (mod 2 pi),      k = sqrt(1 + B^2)

and ``theta`` is then fixed by ``phi``. The first condition is solved exactly
by writing the arrival angle ``u = k s`` on branch ``m`` as
``u in [m pi + asin(rho), (m + 1) pi - asin(rho)]`` with
``B = +-sqrt(sin(u)^2 / rho^2 - 1)``; the second is a scalar root search in
``u`` on each half-branch.
"""
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (DomainError, HorizontalSphereCase, InputError, InvalidOmega,
                     NoSolutionInBudget, VerticalLineCase)
from .geodesics import _wrap, geodesic_bc, geodesic_zw, GeodesicParam

SQRT2 = math.sqrt(2.0)
DEFAULT_GRID_STEP = 1e-3
DEFAULT_VERIFY_TOL = 1e-9
DEFAULT_BRANCH_MAX = 8
DEDUPE_TOL = 1e-8
ROOT_XTOL = 1e-14
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class TargetPoint:
    r: float
    alpha: float
    rho: float
    phi: float

    def __post_init__(self):
        if abs(self.r ** 2 + self.rho ** 2 - 1.0) > 1e-12:
            raise InputError("r^2 + rho^2 must equal 1")
        if self.r < 0 or self.rho < 0:
            raise InputError("moduli must be non-negative")
        for a in (self.alpha, self.phi):
            if not -np.pi <= a < np.pi:
                raise InputError("angles must lie in [-pi, pi)")

    @classmethod
    def from_point(cls, x):
        x = np.asarray(x, dtype=float)
        z, w = complex(x[0], x[1]), complex(x[2], x[3])
        r, rho = abs(z), abs(w)
        # renormalise away rounding so the modulus identity holds to 1e-12
        nrm = math.hypot(r, rho)
        return cls(r / nrm, float(_wrap(np.angle(z))), rho / nrm, float(_wrap(np.angle(w))))

    def zw(self):
        return self.r * np.exp(1j * self.alpha), self.rho * np.exp(1j * self.phi)

    def point(self):
        z, w = self.zw()
        return np.array([z.real, z.imag, w.real, w.imag])


@dataclass
class GeodesicSolution:
    B: float
    theta: float
    s_arc: float
    branch_index: int
    residual: float
    sheet: int = 0      # 0: first arcsin branch of the arrival angle, 1: second
    winding: int = 0    # fiber targets: k in  B s = pi n - omega - 2 pi k

    @property
    def paper_length(self):
        return self.s_arc / SQRT2

    @property
    def param(self):
        return GeodesicParam(self.B, self.theta)

    def endpoint(self):
        return geodesic_bc(self.param, self.s_arc)

    def to_dict(self):
        d = asdict(self)
        d["paper_length"] = self.paper_length
        return d


def _residual(B, theta, s, target_point):
    return float(np.max(np.abs(geodesic_bc(GeodesicParam(B, theta), s) - target_point)))


# --- fiber targets -----------------------------------------------------------

def enumerate_to_fiber(omega, n_max, theta=0.0, verify_tol=DEFAULT_VERIFY_TOL):
    """All geodesics from the identity to ``(cos omega, sin omega, 0, 0)`` with ``n <= n_max``.

    Arrival on the fiber needs ``k s = pi n``; then ``z = (-1)^n e^{-iBs}``, so
    ``B s = pi n - omega - 2 pi k`` for an integer winding ``k`` with
    ``|B s| < pi n``. Even ``n`` with ``k = n / 2`` gives
    ``s = sqrt(pi^2 n^2 - omega^2)``, ``B = -omega / s``. The heading ``theta``
    is free; every solution is checked by forward evaluation.
    """
    if not 0.0 <= omega < 2 * np.pi:
        raise InvalidOmega(f"omega = {omega} not in [0, 2 pi)")
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    target = np.array([np.cos(omega), np.sin(omega), 0.0, 0.0])
    out = []
    for n in range(1, int(n_max) + 1):
        for k in range(0, n + 1):
            m = np.pi * n - omega - 2 * np.pi * k
            if not abs(m) < np.pi * n:
                continue
            s = math.sqrt((np.pi * n) ** 2 - m * m)
            B = m / s
            res = _residual(B, theta, s, target)
            if res > verify_tol:
                raise NoSolutionInBudget(f"fiber solution n={n}, k={k} failed verification "
                                         f"(residual {res:.3e})")
            out.append(GeodesicSolution(B, theta, s, n, res, winding=k))
    out.sort(key=lambda g: g.s_arc)
    return out


def _fiber_n_bound(omega, s_max):
    # every solution on sheet n has s^2 >= w'(2 pi n - w'), w' = min(omega, 2 pi - omega)
    wp = min(omega % (2 * np.pi), 2 * np.pi - omega % (2 * np.pi))
    if wp <= 0:
        return int(math.ceil(s_max / np.pi))
    return int((s_max ** 2 / wp + wp) / (2 * np.pi)) + 1


def enumerate_to_fiber_within(omega, s_max, theta=0.0, verify_tol=DEFAULT_VERIFY_TOL):
    """Every fiber solution with ``s_arc <= s_max``, whatever its ``n``."""
    sols = enumerate_to_fiber(omega, max(1, _fiber_n_bound(omega, s_max)), theta, verify_tol)
    return [g for g in sols if g.s_arc <= s_max]


# --- general targets -----------------------------------------------------------

def b_limit(rho):
    """Largest |B| for which ``|w| = rho`` is reachable: ``sqrt(1/rho^2 - 1)``."""
    return math.sqrt(1.0 / rho ** 2 - 1.0)


def param_equation_lhs(B, target):
    """Residual of the transcendental equation for ``B`` (first-quadrant reduction).

    ``sin((arctan(B rho / sqrt(1 - (1+B^2) rho^2)) - alpha) * k / B) - rho k``.
    For ``B < 0`` this is the displayed textbook form with ``alpha - arctan``
    and ``sqrt(1 + 1/B^2)``; the sign is carried by ``k / B``. At ``B = 0`` the
    sine argument diverges and the oscillation's mean, ``-rho``, is returned.
    """
    rho, alpha = target.rho, target.alpha
    if rho <= 0:
        raise DomainError("rho must be positive")
    B = np.asarray(B, dtype=float)
    lim = b_limit(rho)
    if np.any(np.abs(B) > lim * (1 + 1e-12)):
        raise DomainError(f"|B| beyond sqrt(1/rho^2 - 1) = {lim:.6g}")
    k = np.sqrt(1.0 + B * B)
    root = np.sqrt(np.clip(1.0 - k * k * rho * rho, 0.0, None))
    ang = np.arctan2(B * rho, root)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sin((ang - alpha) * k / B) - rho * k
    return np.where(B == 0.0, -rho, val)


def paper_root_bound(alpha, rho):
    """Lower bound for positive roots ``B`` with principal arrival angle (branch 0, sheet 0).

    The argument takes ``s = asin(rho k) / k``, so second-sheet roots of
    branch 0 are not covered and can fall below it.

    Splits at ``eps = (1 + rho^2) / 2`` on the size of ``rho^2 (1 + B^2)``.
    """
    eps = (1.0 + rho * rho) / 2.0
    q = math.sqrt(1.0 - eps)
    return min(alpha * q / (rho * (1.0 - q)), math.sqrt((1.0 / rho ** 2 - 1.0) / 2.0))


def _check_general(target):
    if target.rho < DEGENERATE_TOL:
        raise VerticalLineCase("target on the vertical line through the identity; "
                               "use enumerate_to_fiber")
    if abs(math.sin(target.alpha)) < DEGENERATE_TOL:
        raise HorizontalSphereCase("target on the horizontal sphere (alpha = 0 mod pi); "
                                   "the B = 0 great circle reaches it")


def _branch_arrays(u, rho, sign):
    sn = np.sin(u)
    k = np.abs(sn) / rho
    B = sign * np.sqrt(np.clip(k * k - 1.0, 0.0, None))
    return B, k, u / k


def _z_rot(u, rho, sign, alpha):
    B, k, s = _branch_arrays(u, rho, sign)
    z = (np.cos(u) + 1j * (B / k) * np.sin(u)) * np.exp(-1j * B * s)
    return z * np.exp(-1j * alpha)


def _theta_for(B, s, target):
    _, w = geodesic_zw(B, 0.0, s)
    return float(_wrap(np.angle(target.zw()[1] / w)))


def enumerate_between(target, grid_step=DEFAULT_GRID_STEP, verify_tol=DEFAULT_VERIFY_TOL,
                      branch_max=DEFAULT_BRANCH_MAX, s_max=None):
    """All geodesics from the identity to a generic target point.

    Scans the arrival-angle branches ``m = 0..branch_max`` (both arcsin sheets
    and both signs of ``B``); with ``s_max`` the branch budget is raised to
    cover every solution with ``s <= s_max`` and longer ones are dropped.
    Returns solutions sorted by arc parameter.
    """
    if not isinstance(target, TargetPoint):
        target = TargetPoint.from_point(target)
    _check_general(target)
    rho, alpha = target.rho, target.alpha
    if s_max is not None:
        # s = u / k >= m pi rho on branch m
        branch_max = max(branch_max, int(math.ceil(s_max / (math.pi * rho))))
    a0 = math.asin(rho)
    tp = target.point()
    found = []
    for m in range(0, int(branch_max) + 1):
        lo, hi = m * np.pi + a0, (m + 1) * np.pi - a0
        if hi <= lo:
            continue
        npts = max(16, int(math.ceil((hi - lo) / grid_step)) + 1)
        # B ~ sqrt(u - lo) near the ends, so grade the grid towards them
        edge = (hi - lo) * np.logspace(-14, -1, 40)
        u = np.unique(np.concatenate([np.linspace(lo, hi, npts), lo + edge, hi - edge]))
        for sign in (1.0, -1.0):
            zr = _z_rot(u, rho, sign, alpha)
            f = zr.imag
            idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)[0]
            for i in idx:
                if f[i] == 0.0:
                    ur = u[i]
                elif f[i + 1] == 0.0:
                    continue
                else:
                    ur = brentq(lambda t: _z_rot(t, rho, sign, alpha).imag, u[i], u[i + 1],
                                xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
                if _z_rot(ur, rho, sign, alpha).real <= 0:
                    continue  # arg z = alpha + pi
                B, k, s = (float(v) for v in _branch_arrays(ur, rho, sign))
                if s_max is not None and s > s_max:
                    continue
                theta = _theta_for(B, s, target)
                res = _residual(B, theta, s, tp)
                if res > verify_tol:
                    continue
                sheet = 0 if ur - m * np.pi <= np.pi / 2 else 1
                found.append(GeodesicSolution(B, theta, s, m, res, sheet=sheet))
    found.sort(key=lambda g: g.s_arc)
    out = []
    for g in found:
        if any(abs(g.B - h.B) < DEDUPE_TOL and abs(g.s_arc - h.s_arc) < DEDUPE_TOL for h in out):
            continue
        out.append(g)
    if not out:
        raise NoSolutionInBudget(f"no geodesic found with branch_max={branch_max}"
                                 + (f", s_max={s_max}" if s_max is not None else ""))
    return out


# --- brute-force oracle -------------------------------------------------------

def _fiber_b_cap(omega, s_max):
    # every solution has s^2 >= w'(2 pi n - w') with w' = min(omega, 2 pi - omega)
    wp = min(omega % (2 * np.pi), 2 * np.pi - omega % (2 * np.pi))
    if wp <= 0:
        raise InputError("target coincides with the identity")
    n_hi = _fiber_n_bound(omega, s_max)
    best = 0.0
    for n in range(1, n_hi + 1):
        smin = math.sqrt(wp * (2 * np.pi * n - wp))
        k = np.pi * n / smin
        best = max(best, math.sqrt(max(k * k - 1.0, 0.0)))
    return best


class _Grid:
    """Nodes ``(B_i, s_j) = (i h, j h)`` and the two sign fields of the endpoint map."""

    def __init__(self, target, h, s_max, b_max):
        self.rho, self.alpha = target.rho, target.alpha
        self.fiber = self.rho < DEGENERATE_TOL
        self.h = h
        nb = int(math.ceil(b_max / h))
        self.B = h * np.arange(-nb - 1, nb + 2)
        self.k = np.sqrt(1.0 + self.B * self.B)
        self.ns = int(math.ceil(s_max / h))  # cells per row

    def positive_w(self, i, j):
        # |w| > rho, or sin(k s) > 0 for fiber targets
        sn = np.sin(self.k[i] * (j * self.h))
        return sn > 0 if self.fiber else np.abs(sn) > self.rho * self.k[i]

    def z_rot(self, i, j):
        B, k, s = self.B[i], self.k[i], j * self.h
        return (np.cos(k * s) + 1j * (B / k) * np.sin(k * s)) * np.exp(-1j * (B * s + self.alpha))

    def flag(self, ii, jj):
        """Keep cells whose corners disagree in both fields and with Re z > 0 on average."""
        p = [self.positive_w(ii + di, jj + dj) for di in (0, 1) for dj in (0, 1)]
        keep = (p[0] != p[1]) | (p[0] != p[2]) | (p[0] != p[3])
        ii, jj = ii[keep], jj[keep]
        c = [self.z_rot(ii + di, jj + dj) for di in (0, 1) for dj in (0, 1)]
        q = [v.imag > 0 for v in c]
        keep = (q[0] != q[1]) | (q[0] != q[2]) | (q[0] != q[3])
        keep &= (c[0].real + c[1].real + c[2].real + c[3].real) > 0
        return ii[keep], jj[keep]


def _cells_exhaustive(g):
    # every cell of the grid, in row bands
    out_i, out_j = [], []
    jj_all = np.arange(g.ns)
    for i in range(g.B.size - 1):
        ii, jj = g.flag(np.full(g.ns, i), jj_all)
        out_i.append(ii)
        out_j.append(jj)
    return np.concatenate(out_i), np.concatenate(out_j)


def _cells_pruned(g):
    # The |w| field changes sign only where k s crosses the ends of the intervals
    # (m pi + a, (m+1) pi - a), a = asin(rho k) (fiber: (2m pi, (2m+1) pi)). Only
    # columns between the crossings of neighbouring rows, widened by 2, can hold a
    # cell with disagreeing corners; those go through the same corner test.
    h, k = g.h, g.k
    m = np.arange(int(math.ceil(k.max() * (g.ns + 3) * h / np.pi)) + 2)
    if g.fiber:
        lo = 2 * np.pi * m[None, :] / k[:, None]
        hi = (2 * m[None, :] + 1) * np.pi / k[:, None]
    else:
        with np.errstate(invalid="ignore"):
            a = np.arcsin(g.rho * k)  # nan beyond the reachable band
        lo = (m[None, :] * np.pi + a[:, None]) / k[:, None]
        hi = ((m[None, :] + 1) * np.pi - a[:, None]) / k[:, None]
    ranges = []
    for e0, e1 in ((lo[:-1], lo[1:]), (hi[:-1], hi[1:])):
        ranges.append((np.fmin(e0, e1), np.fmax(e0, e1)))
    # a row without an interval next to one that has it: the whole interval
    both_lo, both_hi = np.fmin(lo[:-1], lo[1:]), np.fmax(hi[:-1], hi[1:])
    one = np.isnan(lo[:-1]) ^ np.isnan(lo[1:])
    ranges.append((np.where(one, both_lo, np.nan), np.where(one, both_hi, np.nan)))
    out_i, out_j = [], []
    for r0, r1 in ranges:
        ok = np.isfinite(r0) & np.isfinite(r1)
        rows = np.nonzero(ok)[0]
        c0 = np.clip(np.floor(r0[ok] / h).astype(np.int64) - 2, 0, g.ns)
        c1 = np.clip(np.floor(r1[ok] / h).astype(np.int64) + 3, 0, g.ns)
        n = c1 - c0
        sel = n > 0
        rows, c0, n = rows[sel], c0[sel], n[sel]
        ii = np.repeat(rows, n)
        start = np.repeat(np.cumsum(n) - n, n)
        jj = np.repeat(c0, n) + (np.arange(n.sum()) - start)
        out_i.append(ii)
        out_j.append(jj)
    # ranges overlap, so dedupe the (few) flagged cells rather than the candidates
    ii, jj = g.flag(np.concatenate(out_i), np.concatenate(out_j))
    key = np.unique(ii * (g.ns + 1) + jj)
    return key // (g.ns + 1), key % (g.ns + 1)


def brute_force_count(target, grid_step=DEFAULT_GRID_STEP, s_max=2 * np.pi, b_max=None,
                      exhaustive=False):
    """Count solution cells of the endpoint map on a dense ``(B, s)`` grid.

    Independent of :func:`enumerate_between`: evaluates ``|w(B, s)| - rho``
    (``sin(k s)`` for fiber targets) and ``Im(z(B, s) e^{-i alpha})`` on the
    grid nodes, flags the cells where both change sign with ``Re > 0``, and
    merges 8-connected flagged cells. Returns ``(count, witnesses)`` with one
    ``(B, s)`` cell centre per solution.

    By default only cells near the level set of ``|w|`` are tested (see
    ``_cells_pruned``); ``exhaustive=True`` tests every cell and is slow.
    """
    if grid_step <= 0:
        raise InputError("grid_step must be positive")
    if not isinstance(target, TargetPoint):
        target = TargetPoint.from_point(target)
    if b_max is None:
        if target.rho < DEGENERATE_TOL:
            b_max = _fiber_b_cap(target.alpha, s_max)
        else:
            b_max = b_limit(target.rho)
    g = _Grid(target, grid_step, s_max, b_max)
    h, Bg = g.h, g.B
    ci, cj = _cells_exhaustive(g) if exhaustive else _cells_pruned(g)
    cells = list(zip(ci.tolist(), cj.tolist()))

    # 8-connected components of the flagged cells
    todo = set(cells)
    witnesses = []
    while todo:
        seed = todo.pop()
        comp, stack = [seed], [seed]
        while stack:
            ci, cj = stack.pop()
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    nbr = (ci + di, cj + dj)
                    if nbr in todo:
                        todo.remove(nbr)
                        comp.append(nbr)
                        stack.append(nbr)
        ii = np.array([c[0] for c in comp])
        jj = np.array([c[1] for c in comp])
        witnesses.append((float(np.mean(Bg[ii]) + h / 2), float((np.mean(jj) + 0.5) * h)))
    witnesses.sort(key=lambda w: w[1])
    return len(witnesses), witnesses


# --- reports ------------------------------------------------------------------

def report(target, solutions, oracle_count=None):
    """JSON-ready report ``{target, solutions, count, oracle_count?}``."""
    if isinstance(target, TargetPoint):
        tdoc = {"kind": "point", **asdict(target), "x": [float(v) for v in target.point()]}
    else:
        tdoc = {"kind": "fiber", "omega": float(target)}
    doc = {
        "target": tdoc,
        "solutions": [{"B": g.B, "theta": g.theta, "s_arc": g.s_arc,
                       "paper_length": g.paper_length, "branch_index": g.branch_index,
                       "residual": g.residual} for g in solutions],
        "count": len(solutions),
    }
    if oracle_count is not None:
        doc["oracle_count"] = int(oracle_count)
    return doc


def report_json(target, solutions, oracle_count=None):
    return json.dumps(report(target, solutions, oracle_count), indent=2)
