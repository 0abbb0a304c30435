# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Dormand-Prince 5(4) kernel for y' = (A + cos(w*t + phi)*B) y.

Mirrors nvgatesim._integrator step for step (same tableau, PI controller
and dense-output interpolant); kept free of Python objects in the hot
loop so long gate simulations at GHz carriers stay affordable.
"""

import numpy as np

cimport cython
from libc.math cimport cos, sqrt, fabs, fmin, fmax, pow

from . import _dp54_coeffs as dp
from ._integrator import KernelStats, StepSizeUnderflow

ctypedef double complex cplx

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double ALPHA = 0.7 / 5.0
cdef double BETA = 0.4 / 5.0


cdef inline void _rhs(cplx[:, ::1] a, cplx[:, ::1] b, bint driven,
                      double omega, double phi, double t,
                      cplx* v, cplx* out, int n) noexcept nogil:
    cdef int i, j
    cdef cplx acc
    cdef double c
    for i in range(n):
        acc = 0
        for j in range(n):
            acc = acc + a[i, j] * v[j]
        out[i] = acc
    if driven:
        c = cos(omega * t + phi)
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = acc + b[i, j] * v[j]
            out[i] = out[i] + c * acc


def integrate(a_mat, b_mat, double omega, double phi, y0, t_grid,
              double rtol=1e-9, double atol=1e-12, double max_step=np.inf):
    """Same contract as the pure-Python kernel; returns (Y, stats)."""
    cdef cplx[:, ::1] a = np.ascontiguousarray(a_mat, dtype=complex)
    cdef bint driven = b_mat is not None
    cdef cplx[:, ::1] b = np.ascontiguousarray(
        b_mat if driven else np.zeros_like(a_mat), dtype=complex)

    t_arr = np.asarray(t_grid, dtype=float)
    cdef double[::1] grid = np.ascontiguousarray(t_arr)
    cdef int n_snap = grid.shape[0]
    cdef int n = np.asarray(y0).size

    y_np = np.array(y0, dtype=complex).ravel()
    out_np = np.empty((n_snap, n), dtype=complex)
    cdef cplx[::1] y = y_np
    cdef cplx[:, ::1] out = out_np

    # tableau as C arrays
    cdef double[:, ::1] At = np.ascontiguousarray(dp.A)
    cdef double[::1] Ct = np.ascontiguousarray(dp.C)
    cdef double[::1] Et = np.ascontiguousarray(dp.E)
    cdef double[:, ::1] Pt = np.ascontiguousarray(dp.P)

    work_np = np.zeros((10, n), dtype=complex)
    cdef cplx[:, ::1] k = work_np[:7]
    cdef cplx[::1] ys = work_np[7]
    cdef cplx[::1] ynew = work_np[8]

    cdef double t = grid[0]
    cdef double t_end = grid[n_snap - 1]
    cdef int next_snap = 0, i, j, s
    while next_snap < n_snap and grid[next_snap] <= t:
        for i in range(n):
            out[next_snap, i] = y[i]
        next_snap += 1

    cdef double h, d0, d1, sc, err, err_prev, factor, t_new, theta
    cdef double q1, q2, q3, q4, bsum
    cdef cplx acc
    cdef long accepted = 0, rejected = 0, n_rhs = 1
    cdef double tiny = np.finfo(float).eps

    _rhs(a, b, driven, omega, phi, t, &y[0], &k[0, 0], n)

    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d0 += (abs(y[i]) / sc) ** 2
        d1 += (abs(k[0, i]) / sc) ** 2
    d0 = sqrt(d0 / n)
    d1 = sqrt(d1 / n)
    if d1 > 0:
        h = 0.01 * d0 / d1
    else:
        h = (t_end - t) * 1e-6
    h = fmin(fmin(h, max_step), t_end - t)

    err_prev = 1.0
    while t < t_end:
        h = fmin(fmin(h, max_step), t_end - t)
        if h <= 10.0 * tiny * fmax(fabs(t), fabs(t_end)):
            raise StepSizeUnderflow(
                f"step size underflow at t={t:.3e} (h={h:.3e}); "
                "the problem appears too stiff for the 5(4) pair")

        with nogil:
            for s in range(1, 7):
                for i in range(n):
                    acc = 0
                    for j in range(s):
                        acc = acc + At[s, j] * k[j, i]
                    ys[i] = y[i] + h * acc
                _rhs(a, b, driven, omega, phi, t + Ct[s] * h,
                     &ys[0], &k[s, 0], n)
            # stage-7 input is the 5th-order solution (FSAL)
            for i in range(n):
                ynew[i] = ys[i]
            err = 0.0
            for i in range(n):
                acc = 0
                for j in range(7):
                    acc = acc + Et[j] * k[j, i]
                sc = atol + rtol * fmax(abs(y[i]), abs(ynew[i]))
                err += (h * abs(acc) / sc) ** 2
            err = sqrt(err / n)
        n_rhs += 6

        if err <= 1.0:
            t_new = t + h
            while next_snap < n_snap and grid[next_snap] <= t_new + 1e-12 * h:
                theta = (grid[next_snap] - t) / h
                q1 = theta
                q2 = theta * theta
                q3 = q2 * theta
                q4 = q3 * theta
                for i in range(n):
                    acc = 0
                    for j in range(7):
                        bsum = (Pt[j, 0] * q1 + Pt[j, 1] * q2
                                + Pt[j, 2] * q3 + Pt[j, 3] * q4)
                        acc = acc + bsum * k[j, i]
                    out[next_snap, i] = y[i] + h * acc
                next_snap += 1
            t = t_new
            for i in range(n):
                y[i] = ynew[i]
                k[0, i] = k[6, i]
            accepted += 1
            err = fmax(err, 1e-10)
            factor = SAFETY * pow(err, -ALPHA) * pow(err_prev, BETA)
            h *= fmin(MAX_FACTOR, fmax(MIN_FACTOR, factor))
            err_prev = err
        else:
            rejected += 1
            h *= fmax(MIN_FACTOR, SAFETY * pow(err, -0.2))

    while next_snap < n_snap:
        for i in range(n):
            out[next_snap, i] = y[i]
        next_snap += 1
    return out_np, KernelStats(accepted, rejected, n_rhs)
