"""Backend parity and structural properties of the hot kernels."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import solve_banded

from arks._kernels import _numpy_backend as npk

try:
    from arks._kernels import _cy_backend as cyk
except ImportError:
    cyk = None

needs_ext = pytest.mark.skipif(cyk is None, reason="compiled backend not built")


def _mmatrix(n, rng, scale=0.3):
    off = -scale * rng.random(n)
    lower = off.copy()
    lower[0] = 0.0
    upper = -scale * rng.random(n)
    upper[-1] = 0.0
    diag = 1.0 - (lower + upper)
    return lower, diag, upper


def test_tridiag_matches_lapack(rng):
    n = 40
    lower, diag, upper = _mmatrix(n, rng)
    rhs = rng.standard_normal((7, n))
    x = npk.tridiag_solve(lower, diag, upper, rhs)
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    for k in range(rhs.shape[0]):
        ref = solve_banded((1, 1), ab, rhs[k])
        assert np.max(np.abs(x[k] - ref)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(4, 64))
def test_tridiag_mmatrix_preserves_nonnegativity(seed, n):
    """No-cancellation Thomas recurrences keep nonnegative data nonnegative."""
    rng = np.random.default_rng(seed)
    lower, diag, upper = _mmatrix(n, rng, scale=0.49)
    rhs = rng.random(n)  # strictly nonnegative
    x = npk.tridiag_solve(lower, diag, upper, rhs)
    assert np.min(x) >= 0.0


def test_upwind_div_conserves_mass_2d(rng):
    u = rng.random((24, 17))
    vx = rng.standard_normal((23, 17))
    vy = rng.standard_normal((24, 16))
    div = np.zeros_like(u)
    npk.add_upwind_div_2d(u, vx, vy, 24.0, 17.0, div)
    # flux-form telescoping: total divergence vanishes to rounding
    assert abs(np.sum(div) / (24 * 17)) < 1e-13 * np.max(np.abs(div))


def test_upwind_div_radial_conserves(rng):
    from arks import grid as G

    g = G.radial_ball(1.0, 48)
    u = rng.random(48)
    v = rng.standard_normal(47)
    div = np.zeros(48)
    npk.add_upwind_div_radial(u, v, g.face_areas[1:-1], 1.0 / g.cell_volumes, div)
    assert abs(np.sum(div * g.cell_volumes)) < 1e-12 * np.max(np.abs(div))


def test_upwind_uses_donor_cell():
    u = np.array([1.0, 0.0, 0.0, 2.0])
    v = np.array([1.0, 0.0, -1.0])  # rightward at face 0, leftward at face 2
    div = np.zeros(4)
    npk.add_upwind_div_1d(u, v, 1.0, div)
    # face 0 carries u[0] rightward; face 2 carries u[3] leftward
    assert div[0] == -1.0 and div[1] == 1.0
    assert div[3] == -2.0 and div[2] == 2.0


def test_outflow_rate_brute_force(rng):
    u_shape = (9, 7)
    vx = rng.standard_normal((8, 7))
    vy = rng.standard_normal((9, 6))
    rate = npk.outflow_rate_2d(vx, vy, 9.0, 7.0)
    for i in range(9):
        for j in range(7):
            out = 0.0
            if i < 8:
                out += max(vx[i, j], 0.0) * 9.0
            if i > 0:
                out += max(-vx[i - 1, j], 0.0) * 9.0
            if j < 6:
                out += max(vy[i, j], 0.0) * 7.0
            if j > 0:
                out += max(-vy[i, j - 1], 0.0) * 7.0
            assert rate[i, j] == pytest.approx(out, rel=1e-12)


@needs_ext
def test_backends_agree_bitwise(rng):
    n = 33
    lower, diag, upper = _mmatrix(n, rng)
    rhs2 = rng.standard_normal((11, n))
    assert np.array_equal(
        npk.tridiag_solve(lower, diag, upper, rhs2),
        cyk.tridiag_solve(lower, diag, upper, rhs2),
    )
    rhs1 = rng.random(n)
    assert np.array_equal(
        npk.tridiag_solve(lower, diag, upper, rhs1),
        cyk.tridiag_solve(lower, diag, upper, rhs1),
    )

    u = rng.random((20, 30))
    vx = rng.standard_normal((19, 30))
    vy = rng.standard_normal((20, 29))
    d1, d2 = np.zeros_like(u), np.zeros_like(u)
    npk.add_upwind_div_2d(u, vx, vy, 20.0, 30.0, d1)
    cyk.add_upwind_div_2d(u, vx, vy, 20.0, 30.0, d2)
    assert np.array_equal(d1, d2)

    assert np.array_equal(
        npk.outflow_rate_2d(vx, vy, 20.0, 30.0),
        cyk.outflow_rate_2d(vx, vy, 20.0, 30.0),
    )

    u1 = rng.random(25)
    v1 = rng.standard_normal(24)
    d1, d2 = np.zeros(25), np.zeros(25)
    npk.add_upwind_div_1d(u1, v1, 25.0, d1)
    cyk.add_upwind_div_1d(u1, v1, 25.0, d2)
    assert np.array_equal(d1, d2)
    assert np.array_equal(npk.outflow_rate_1d(v1, 25.0), cyk.outflow_rate_1d(v1, 25.0))

    areas = rng.random(24) + 0.5
    invv = 1.0 / (rng.random(25) + 0.5)
    d1, d2 = np.zeros(25), np.zeros(25)
    npk.add_upwind_div_radial(u1, v1, areas, invv, d1)
    cyk.add_upwind_div_radial(u1, v1, areas, invv, d2)
    assert np.array_equal(d1, d2)
    assert np.array_equal(
        npk.outflow_rate_radial(v1, areas, invv),
        cyk.outflow_rate_radial(v1, areas, invv),
    )
