"""Pure-Python adaptive Dormand-Prince 5(4) kernel.

Integrates the linear system y' = (A + cos(omega*t + phi) * B) y for a
complex square matrix A (and optional drive matrix B), with PI step
control and quartic dense output evaluated on a caller-supplied snapshot
grid.  The compiled extension implements exactly the same scheme; both
must produce matching trajectories to integration tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _dp54_coeffs as dp


class StepSizeUnderflow(RuntimeError):
    """Raised when the controller pushes the step below floating-point
    resolution (stiffness guard)."""


@dataclass
class KernelStats:
    steps_accepted: int
    steps_rejected: int
    rhs_evaluations: int


def integrate(a_mat, b_mat, omega, phi, y0, t_grid,
              rtol=1e-9, atol=1e-12, max_step=np.inf):
    """Integrate from t_grid[0] to t_grid[-1]; returns (Y, stats) with
    Y[k] = y(t_grid[k])."""
    a_mat = np.ascontiguousarray(a_mat, dtype=complex)
    y = np.array(y0, dtype=complex)
    t_grid = np.asarray(t_grid, dtype=float)
    n = y.size
    driven = b_mat is not None
    if driven:
        b_mat = np.ascontiguousarray(b_mat, dtype=complex)

    def rhs(t, v):
        out = a_mat @ v
        if driven:
            out += math.cos(omega * t + phi) * (b_mat @ v)
        return out

    out = np.empty((t_grid.size, n), dtype=complex)
    t = float(t_grid[0])
    t_end = float(t_grid[-1])
    next_snap = 0
    while next_snap < t_grid.size and t_grid[next_snap] <= t:
        out[next_snap] = y
        next_snap += 1

    k = np.empty((7, n), dtype=complex)
    f0 = rhs(t, y)
    n_rhs = 1

    # Initial step from the ratio of solution and derivative scales.
    scale = atol + rtol * np.abs(y)
    d0 = math.sqrt(float(np.mean(np.abs(y / scale) ** 2)))
    d1 = math.sqrt(float(np.mean(np.abs(f0 / scale) ** 2)))
    h = 0.01 * d0 / d1 if d1 > 0 else (t_end - t) * 1e-6
    h = min(h, max_step, t_end - t) if t_end > t else 0.0

    err_prev = 1.0
    accepted = rejected = 0
    tiny = np.finfo(float).eps

    while t < t_end:
        h = min(h, max_step, t_end - t)
        if h <= 10.0 * tiny * max(abs(t), abs(t_end)):
            raise StepSizeUnderflow(
                f"step size underflow at t={t:.3e} (h={h:.3e}); "
                "the problem appears too stiff for the 5(4) pair")

        k[0] = f0
        for s in range(1, 7):
            ys = y + h * (dp.A[s, :s] @ k[:s])
            k[s] = rhs(t + dp.C[s] * h, ys)
        n_rhs += 6
        y_new = ys  # stage 7 input is the 5th-order solution (FSAL)
        f_new = k[6]

        err_vec = h * (dp.E @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean(np.abs(err_vec / scale) ** 2)))

        if err <= 1.0:
            # Dense output for snapshots inside (t, t+h].
            t_new = t + h
            while next_snap < t_grid.size and t_grid[next_snap] <= t_new + 1e-12 * h:
                theta = (t_grid[next_snap] - t) / h
                q = np.array([theta, theta ** 2, theta ** 3, theta ** 4])
                out[next_snap] = y + h * ((dp.P @ q) @ k)
                next_snap += 1
            t, y, f0 = t_new, y_new, f_new
            accepted += 1
            err = max(err, 1e-10)
            factor = dp.SAFETY * err ** -dp.ALPHA * err_prev ** dp.BETA
            h *= min(dp.MAX_FACTOR, max(dp.MIN_FACTOR, factor))
            err_prev = err
        else:
            rejected += 1
            h *= max(dp.MIN_FACTOR, dp.SAFETY * err ** -0.2)

    while next_snap < t_grid.size:
        out[next_snap] = y
        next_snap += 1
    return out, KernelStats(accepted, rejected, n_rhs)
