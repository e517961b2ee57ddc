"""Pure-numpy implementations of the hot per-step kernels.

The compiled backend mirrors these expression-for-expression; the parity tests
assert bitwise-identical results, so keep the floating-point evaluation order
aligned with ``_cy_backend.pyx`` when editing either file.
"""

import numpy as np

BACKEND = "numpy"


def tridiag_solve(lower, diag, upper, rhs):
    """Thomas solve of a tridiagonal system along the last axis of ``rhs``.

    ``lower[0]`` and ``upper[-1]`` are ignored.  For the diagonally dominant
    M-matrices used here (positive diagonal, nonpositive off-diagonals) the
    recurrences contain no cancellation, so a nonnegative right-hand side
    yields a nonnegative solution in floating point.
    """
    rhs = np.asarray(rhs)
    squeeze = rhs.ndim == 1
    b = rhs.reshape(1, -1) if squeeze else rhs
    n = b.shape[1]
    cp = np.empty(n)
    dp = np.empty_like(b)
    cp[0] = upper[0] / diag[0]
    dp[:, 0] = b[:, 0] / diag[0]
    for i in range(1, n):
        w = diag[i] - lower[i] * cp[i - 1]
        cp[i] = upper[i] / w
        dp[:, i] = (b[:, i] - lower[i] * dp[:, i - 1]) / w
    x = np.empty_like(b)
    x[:, n - 1] = dp[:, n - 1]
    for i in range(n - 2, -1, -1):
        x[:, i] = dp[:, i] - cp[i] * x[:, i + 1]
    return x[0] if squeeze else x


def _donor_flux(v, u_left, u_right):
    # face flux with donor-cell upwinding; positive v means left-to-right flow
    return np.where(v > 0.0, v * u_left, v * u_right)


def add_upwind_div_1d(u, v, inv_h, out):
    """out += divergence of the donor-cell drift flux (1D uniform cells)."""
    f = _donor_flux(v, u[:-1], u[1:])
    fl = np.concatenate(([0.0], f))
    fr = np.concatenate((f, [0.0]))
    out += (fl - fr) * inv_h
    return out


def add_upwind_div_2d(u, vx, vy, inv_hx, inv_hy, out):
    """out += drift-flux divergence on a uniform 2D tensor grid.

    vx has shape (nx-1, ny) (interior x-faces), vy has shape (nx, ny-1).
    """
    fx = _donor_flux(vx, u[:-1, :], u[1:, :])
    fl = np.pad(fx, ((1, 0), (0, 0)))
    fr = np.pad(fx, ((0, 1), (0, 0)))
    out += (fl - fr) * inv_hx
    fy = _donor_flux(vy, u[:, :-1], u[:, 1:])
    fb = np.pad(fy, ((0, 0), (1, 0)))
    ft = np.pad(fy, ((0, 0), (0, 1)))
    out += (fb - ft) * inv_hy
    return out


def add_upwind_div_radial(u, v, areas_int, inv_vol, out):
    """out += drift-flux divergence in conservative radial form.

    ``v`` and ``areas_int`` live on the n-1 interior faces.
    """
    f = _donor_flux(v, u[:-1], u[1:])
    g = areas_int * f
    gl = np.concatenate(([0.0], g))
    gr = np.concatenate((g, [0.0]))
    out += (gl - gr) * inv_vol
    return out


def outflow_rate_1d(v, inv_h):
    """Per-cell outflow rate of the drift velocity field (for CFL control)."""
    pos = np.maximum(v, 0.0)
    neg = np.maximum(-v, 0.0)
    return (np.concatenate((pos, [0.0])) + np.concatenate(([0.0], neg))) * inv_h


def outflow_rate_2d(vx, vy, inv_hx, inv_hy):
    px = np.pad(np.maximum(vx, 0.0), ((0, 1), (0, 0)))
    nx_ = np.pad(np.maximum(-vx, 0.0), ((1, 0), (0, 0)))
    rx = (px + nx_) * inv_hx
    py = np.pad(np.maximum(vy, 0.0), ((0, 0), (0, 1)))
    ny_ = np.pad(np.maximum(-vy, 0.0), ((0, 0), (1, 0)))
    ry = (py + ny_) * inv_hy
    return rx + ry


def outflow_rate_radial(v, areas_int, inv_vol):
    pos = areas_int * np.maximum(v, 0.0)
    neg = areas_int * np.maximum(-v, 0.0)
    return (np.concatenate((pos, [0.0])) + np.concatenate(([0.0], neg))) * inv_vol
