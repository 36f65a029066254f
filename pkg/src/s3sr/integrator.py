"""Dormand-Prince 5(4) with PI step-size control and continuous output.

Deliberately no projection onto invariant manifolds: drift in the conserved
quantities is what the callers monitor.
"""
from dataclasses import dataclass

import numpy as np

from .errors import StepSizeUnderflow

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Shampine's quartic interpolant for the seven stages (FSAL stage last).
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# PI controller exponents (Hairer & Wanner, DOPRI5 with beta = 0.04)
BETA = 0.04
ALPHA = 0.2 - 0.75 * BETA


def _norm(v):
    # RMS over the last axis, worst case over any leading (batch) axes.
    return float(np.max(np.sqrt(np.mean(v * v, axis=-1))))


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    n_steps: int
    n_rejected: int
    n_evals: int


def solve(f, t0, y0, t_end, rtol=1e-10, atol=1e-12, max_step=0.1, t_eval=None,
          first_step=None):
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end > t0``.

    ``y0`` may carry leading batch axes; the error norm is then taken per
    trailing state vector and the step is governed by the worst member, so
    every member of the batch meets the tolerances on the shared mesh.

    Returns the accepted-step mesh, or the values at ``t_eval`` (sorted,
    inside ``[t0, t_end]``) computed with the continuous extension.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    t_end = float(t_end)
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        out_y = np.empty((t_eval.size,) + y.shape)
        k_eval = np.searchsorted(t_eval, t, side="left")
        while k_eval < t_eval.size and t_eval[k_eval] <= t:
            out_y[k_eval] = y
            k_eval += 1
    ts, ys = [t], [y.copy()]
    if t_end <= t:
        if t_eval is not None:
            return Solution(t_eval, out_y, 0, 0, 0)
        return Solution(np.array(ts), np.array(ys), 0, 0, 0)

    K = np.empty((7,) + y.shape)
    K[0] = f(t, y)
    n_evals = 1
    span = t_end - t
    if first_step is None:
        scale = atol + rtol * np.abs(y)
        d0 = _norm(y / scale)
        d1 = _norm(K[0] / scale)
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, 1e-2)
    else:
        h = first_step
    h = min(h, max_step, span)
    err_old = 1e-4
    n_steps = n_rej = 0

    while t < t_end:
        min_step = 10 * np.finfo(float).eps * max(1.0, abs(t))
        if h < min_step:
            raise StepSizeUnderflow(f"step {h:.3e} below {min_step:.3e} at t = {t:.6g}")
        last = t + h >= t_end
        if last:
            h = t_end - t
        for i in range(1, 6):
            K[i] = f(t + _C[i] * h, y + h * np.tensordot(_A[i], K[:i], axes=1))
        y_new = y + h * np.tensordot(_B, K[:6], axes=1)
        K[6] = f(t + h, y_new)
        n_evals += 6
        err_vec = h * np.tensordot(_E, K, axes=1)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = _norm(err_vec / scale)
        if not np.isfinite(err):
            h *= MIN_FACTOR
            n_rej += 1
            continue
        if err <= 1.0:
            t_new = t_end if last else t + h
            if t_eval is not None:
                Q = None
                while k_eval < t_eval.size and t_eval[k_eval] <= t_new:
                    if Q is None:
                        Q = np.tensordot(_P.T, K, axes=1)
                    theta = (t_eval[k_eval] - t) / h
                    powers = theta ** np.arange(1, 5)
                    out_y[k_eval] = y + h * np.tensordot(powers, Q, axes=1)
                    k_eval += 1
            else:
                ts.append(t_new)
                ys.append(y_new.copy())
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err ** -ALPHA * err_old ** BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_old = max(err, 1e-4)
            t, y = t_new, y_new
            K[0] = K[6]
            n_steps += 1
            h = min(h * factor, max_step)
        else:
            factor = max(MIN_FACTOR, SAFETY * err ** -ALPHA)
            h *= factor
            n_rej += 1

    if t_eval is not None:
        return Solution(t_eval, out_y, n_steps, n_rej, n_evals)
    return Solution(np.array(ts), np.array(ys), n_steps, n_rej, n_evals)
