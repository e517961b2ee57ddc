# cython: language_level=3
"""Compiled twins of the numpy kernels (see _numpy_backend.py).

Evaluation order matches the numpy backend expression-for-expression; the
extension is built with -ffp-contract=off so results stay bitwise identical.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def tridiag_solve(double[::1] lower, double[::1] diag, double[::1] upper, rhs):
    rhs_arr = np.asarray(rhs, dtype=np.float64)
    squeeze = rhs_arr.ndim == 1
    b_arr = np.ascontiguousarray(rhs_arr.reshape(1, -1) if squeeze else rhs_arr)
    cdef double[:, ::1] b = b_arr
    cdef Py_ssize_t m = b.shape[0]
    cdef Py_ssize_t n = b.shape[1]
    cp_arr = np.empty(n)
    dp_arr = np.empty_like(b_arr)
    x_arr = np.empty_like(b_arr)
    cdef double[::1] cp = cp_arr
    cdef double[:, ::1] dp = dp_arr
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t i, j
    cdef double w
    cp[0] = upper[0] / diag[0]
    for j in range(m):
        dp[j, 0] = b[j, 0] / diag[0]
    for i in range(1, n):
        w = diag[i] - lower[i] * cp[i - 1]
        cp[i] = upper[i] / w
        for j in range(m):
            dp[j, i] = (b[j, i] - lower[i] * dp[j, i - 1]) / w
    for j in range(m):
        x[j, n - 1] = dp[j, n - 1]
    for i in range(n - 2, -1, -1):
        for j in range(m):
            x[j, i] = dp[j, i] - cp[i] * x[j, i + 1]
    return x_arr[0] if squeeze else x_arr


def add_upwind_div_1d(double[::1] u, double[::1] v, double inv_h, out):
    cdef double[::1] o = out
    cdef Py_ssize_t n = u.shape[0]
    f_arr = np.empty(n - 1)
    cdef double[::1] f = f_arr
    cdef Py_ssize_t i
    cdef double fl, fr
    for i in range(n - 1):
        f[i] = v[i] * u[i] if v[i] > 0.0 else v[i] * u[i + 1]
    for i in range(n):
        fl = f[i - 1] if i > 0 else 0.0
        fr = f[i] if i < n - 1 else 0.0
        o[i] = o[i] + (fl - fr) * inv_h
    return out


def add_upwind_div_2d(double[:, ::1] u, double[:, ::1] vx, double[:, ::1] vy,
                      double inv_hx, double inv_hy, out):
    cdef double[:, ::1] o = out
    cdef Py_ssize_t nx = u.shape[0]
    cdef Py_ssize_t ny = u.shape[1]
    fx_arr = np.empty((nx - 1, ny))
    fy_arr = np.empty((nx, ny - 1))
    cdef double[:, ::1] fx = fx_arr
    cdef double[:, ::1] fy = fy_arr
    cdef Py_ssize_t i, j
    cdef double fl, fr, v
    for i in range(nx - 1):
        for j in range(ny):
            v = vx[i, j]
            fx[i, j] = v * u[i, j] if v > 0.0 else v * u[i + 1, j]
    for i in range(nx):
        for j in range(ny):
            fl = fx[i - 1, j] if i > 0 else 0.0
            fr = fx[i, j] if i < nx - 1 else 0.0
            o[i, j] = o[i, j] + (fl - fr) * inv_hx
    for i in range(nx):
        for j in range(ny - 1):
            v = vy[i, j]
            fy[i, j] = v * u[i, j] if v > 0.0 else v * u[i, j + 1]
    for i in range(nx):
        for j in range(ny):
            fl = fy[i, j - 1] if j > 0 else 0.0
            fr = fy[i, j] if j < ny - 1 else 0.0
            o[i, j] = o[i, j] + (fl - fr) * inv_hy
    return out


def add_upwind_div_radial(double[::1] u, double[::1] v, double[::1] areas_int,
                          double[::1] inv_vol, out):
    cdef double[::1] o = out
    cdef Py_ssize_t n = u.shape[0]
    g_arr = np.empty(n - 1)
    cdef double[::1] g = g_arr
    cdef Py_ssize_t i
    cdef double gl, gr, f
    for i in range(n - 1):
        f = v[i] * u[i] if v[i] > 0.0 else v[i] * u[i + 1]
        g[i] = areas_int[i] * f
    for i in range(n):
        gl = g[i - 1] if i > 0 else 0.0
        gr = g[i] if i < n - 1 else 0.0
        o[i] = o[i] + (gl - gr) * inv_vol[i]
    return out


def outflow_rate_1d(double[::1] v, double inv_h):
    cdef Py_ssize_t n = v.shape[0] + 1
    rate_arr = np.empty(n)
    cdef double[::1] rate = rate_arr
    cdef Py_ssize_t i
    cdef double pos, neg
    for i in range(n):
        pos = max(v[i], 0.0) if i < n - 1 else 0.0
        neg = max(-v[i - 1], 0.0) if i > 0 else 0.0
        rate[i] = (pos + neg) * inv_h
    return rate_arr


def outflow_rate_2d(double[:, ::1] vx, double[:, ::1] vy,
                    double inv_hx, double inv_hy):
    cdef Py_ssize_t nx = vx.shape[0] + 1
    cdef Py_ssize_t ny = vy.shape[1] + 1
    rate_arr = np.empty((nx, ny))
    cdef double[:, ::1] rate = rate_arr
    cdef Py_ssize_t i, j
    cdef double px, nx_, py, ny_, rx, ry
    for i in range(nx):
        for j in range(ny):
            px = max(vx[i, j], 0.0) if i < nx - 1 else 0.0
            nx_ = max(-vx[i - 1, j], 0.0) if i > 0 else 0.0
            rx = (px + nx_) * inv_hx
            py = max(vy[i, j], 0.0) if j < ny - 1 else 0.0
            ny_ = max(-vy[i, j - 1], 0.0) if j > 0 else 0.0
            ry = (py + ny_) * inv_hy
            rate[i, j] = rx + ry
    return rate_arr


def outflow_rate_radial(double[::1] v, double[::1] areas_int, double[::1] inv_vol):
    cdef Py_ssize_t n = v.shape[0] + 1
    rate_arr = np.empty(n)
    cdef double[::1] rate = rate_arr
    cdef Py_ssize_t i
    cdef double pos, neg
    for i in range(n):
        pos = areas_int[i] * max(v[i], 0.0) if i < n - 1 else 0.0
        neg = areas_int[i - 1] * max(-v[i - 1], 0.0) if i > 0 else 0.0
        rate[i] = (pos + neg) * inv_vol[i]
    return rate_arr
