"""Quaternion group law on S^3 and the left-invariant frame N, X, Y, Z.

Points are plain float arrays of shape ``(..., 4)`` holding ``(x1, x2, x3, x4)``,
i.e. the quaternion ``x1 + x2 i + x3 j + x4 k``. All functions broadcast over
leading axes.

The horizontal distribution is span{X, Y}; Z completes the tangent frame and
N is the outward normal. In ambient coordinates

    N = x,   X = I1 x,   Y = I2 x,   Z = I3 x.
"""
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .errors import EmptyInput, NonHorizontalPath, NonUnitInput

UNIT_TOL = 1e-12
DEFAULT_TOL = 1e-9

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

I1 = np.array([[0, 0, -1, 0],
               [0, 0, 0, -1],
               [1, 0, 0, 0],
               [0, 1, 0, 0]], dtype=float)
I2 = np.array([[0, 0, 0, -1],
               [0, 0, 1, 0],
               [0, -1, 0, 0],
               [1, 0, 0, 0]], dtype=float)
I3 = np.array([[0, -1, 0, 0],
               [1, 0, 0, 0],
               [0, 0, 0, 1],
               [0, 0, -1, 0]], dtype=float)


class Frame(NamedTuple):
    N: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray


class FrameCoeffs(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    n: np.ndarray


def as_point(x, tol=UNIT_TOL):
    """Return ``x`` as a float array, raising NonUnitInput off the unit sphere."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (4,):
        raise NonUnitInput(f"expected trailing dimension 4, got shape {x.shape}")
    dev = np.abs(np.einsum("...i,...i->...", x, x) - 1.0)
    if np.any(dev > tol):
        raise NonUnitInput(f"point off the unit sphere by {float(np.max(dev)):.3e}")
    return x


def _mul(x, y):
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    y1, y2, y3, y4 = np.moveaxis(y, -1, 0)
    return np.stack([
        x1 * y1 - x2 * y2 - x3 * y3 - x4 * y4,
        x2 * y1 + x1 * y2 - x4 * y3 + x3 * y4,
        x3 * y1 + x4 * y2 + x1 * y3 - x2 * y4,
        x4 * y1 - x3 * y2 + x2 * y3 + x1 * y4,
    ], axis=-1)


def quat_mul(x, y):
    """Group product ``x o y`` (Hamilton product of unit quaternions)."""
    return _mul(as_point(x), as_point(y))


def quat_conj(x):
    """Conjugate, which is the group inverse on S^3."""
    x = np.asarray(x, dtype=float)
    return x * np.array([1.0, -1.0, -1.0, -1.0])


def quat_inv(x):
    return quat_conj(as_point(x))


def _frame(x):
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    Z = np.stack([-x2, x1, x4, -x3], axis=-1)
    X = np.stack([-x3, -x4, x1, x2], axis=-1)
    Y = np.stack([-x4, x3, -x2, x1], axis=-1)
    return Frame(x, X, Y, Z)


def left_pushforward(x):
    """Differential of left translation by ``x``.

    Columns, in order, are N, Z, X, Y evaluated at ``x`` (the images of the
    unit vectors 1, i, j, k). The matrix is orthogonal.
    """
    f = _frame(as_point(x))
    return np.stack([f.N, f.Z, f.X, f.Y], axis=-1)


def frame_at(x):
    return _frame(as_point(x))


def _coeffs(x, v):
    f = _frame(x)
    dot = lambda u: np.einsum("...i,...i->...", v, u)  # noqa: E731
    return FrameCoeffs(dot(f.X), dot(f.Y), dot(f.Z), dot(f.N))


def frame_coeffs(x, v):
    """Components ``(a, b, c, n)`` of the ambient vector ``v`` in the frame at ``x``.

    ``n`` is the normal part, zero for genuine tangent vectors.
    """
    return _coeffs(as_point(x), np.asarray(v, dtype=float))


def from_coeffs(x, a, b, c, n=0.0):
    """Ambient vector ``aX + bY + cZ + nN`` at ``x``."""
    f = frame_at(x)
    a, b, c, n = (np.asarray(t, dtype=float)[..., None] for t in (a, b, c, n))
    return a * f.X + b * f.Y + c * f.Z + n * f.N


def contact_form(x, v):
    """Evaluate ``-x2 dx1 + x1 dx2 + x4 dx3 - x3 dx4`` on ``v`` at ``x``."""
    x = as_point(x)
    v = np.asarray(v, dtype=float)
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    v1, v2, v3, v4 = np.moveaxis(v, -1, 0)
    return -x2 * v1 + x1 * v2 + x4 * v3 - x3 * v4


def linear_field_bracket(A, B, x):
    """Lie bracket of the linear vector fields ``Ax . grad`` and ``Bx . grad`` at ``x``.

    For linear fields the Jacobians are the matrices themselves, so
    ``[V_A, V_B](x) = B A x - A B x``.
    """
    x = np.asarray(x, dtype=float)
    return x @ (B @ A - A @ B).T


def is_horizontal(points, velocities, tol=DEFAULT_TOL):
    """Check ``|c| <= tol`` on every sample; returns ``(ok, max_abs_c)``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    velocities = np.atleast_2d(np.asarray(velocities, dtype=float))
    if points.shape[0] == 0:
        raise EmptyInput("no samples")
    c = frame_coeffs(points, velocities).c
    cmax = float(np.max(np.abs(c)))
    return cmax <= tol, cmax


def horizontal_length(s, points, velocities, tol=DEFAULT_TOL):
    """Length of a sampled horizontal curve, by composite Simpson on ``sqrt(a^2 + b^2)``.

    ``s`` are the parameter values of the samples; no resampling is done.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.size == 0:
        raise EmptyInput("no samples")
    ok, cmax = is_horizontal(points, velocities, tol)
    if not ok:
        raise NonHorizontalPath(f"max |c| = {cmax:.3e} exceeds tol {tol:.1e}")
    if s.size == 1:
        return 0.0
    a, b, _, _ = frame_coeffs(np.atleast_2d(points), np.atleast_2d(velocities))
    return float(simpson(np.hypot(a, b), x=s))
