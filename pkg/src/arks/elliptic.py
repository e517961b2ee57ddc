"""Helmholtz solves (κ − Δ)v = s·u with zero-flux boundaries.

Two mandatory paths: a cosine-spectral direct solve (tensor grids, exact to
rounding) and a matrix-free Jacobi-preconditioned conjugate gradient solve
(any grid; the only path on radial grids, and an independent oracle on
rectangles).  κ > 0 always holds here, so the operator is invertible with no
compatibility condition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from .errors import InvalidParameterError, MisuseError, SolverFailureError
from .grid import Field, Grid, neumann_laplacian
from .semigroup import laplacian_eigenvalues

__all__ = ["EllipticSolver", "HelmholtzProblem", "solve"]


class EllipticSolver(enum.Enum):
    SPECTRAL_COSINE = "spectral-cosine"
    CONJUGATE_GRADIENT = "conjugate-gradient"


@dataclass(frozen=True)
class HelmholtzProblem:
    grid: Grid
    kappa: float
    source_scale: float
    solver: EllipticSolver = EllipticSolver.SPECTRAL_COSINE
    tol: float = 1e-10
    max_iter: int = 20000

    def __post_init__(self):
        if self.kappa <= 0:
            raise InvalidParameterError("kappa must be > 0 (invertible operator)")
        if self.source_scale <= 0:
            raise InvalidParameterError("source_scale must be > 0")
        if self.solver is EllipticSolver.SPECTRAL_COSINE and not self.grid.is_tensor:
            raise MisuseError("spectral solver needs a uniform tensor grid")


def default_problem(grid: Grid, kappa: float, source_scale: float) -> HelmholtzProblem:
    solver = (
        EllipticSolver.SPECTRAL_COSINE
        if grid.is_tensor
        else EllipticSolver.CONJUGATE_GRADIENT
    )
    return HelmholtzProblem(grid, kappa, source_scale, solver)


def _solve_spectral(prob: HelmholtzProblem, source: np.ndarray) -> np.ndarray:
    g = prob.grid
    mus = [laplacian_eigenvalues(c, h) for c, h in zip(g.cells, g.spacing)]
    total = mus[0] if len(mus) == 1 else mus[0][:, None] + mus[1][None, :]
    coeff = dctn(source, type=2, norm="ortho")
    coeff /= prob.kappa + total
    return idctn(coeff, type=2, norm="ortho")


def _operator_diagonal(grid: Grid, kappa: float) -> np.ndarray:
    """Diagonal of κ − L_h (flux form), used as the Jacobi preconditioner."""
    if grid.is_tensor:
        diag = np.full(grid.shape, kappa)
        for d, h in enumerate(grid.spacing):
            contrib = np.full(grid.cells[d], 2.0 / h**2)
            contrib[0] = contrib[-1] = 1.0 / h**2
            shape = [1] * len(grid.cells)
            shape[d] = grid.cells[d]
            diag += contrib.reshape(shape)
        return diag
    a = grid.face_areas
    dr = grid.spacing[0]
    return kappa + (a[:-1] + a[1:]) / (grid.cell_volumes * dr)


def _solve_cg(prob: HelmholtzProblem, source: np.ndarray, x0=None) -> np.ndarray:
    """Jacobi-preconditioned CG in the volume-weighted inner product.

    The flux-form operator is self-adjoint with respect to cell volumes (not
    the plain Euclidean product on radial grids), so all reductions carry the
    volume weight.  Sums are fixed-order pairwise for determinism.
    """
    g = prob.grid
    kappa = prob.kappa
    vols = g.cell_volumes

    def matvec(x):
        return kappa * x - neumann_laplacian(Field(g, x)).values

    def vdot(a, b):
        return float(np.sum(vols * a * b))

    inv_diag = 1.0 / _operator_diagonal(g, kappa)
    b = source
    b_norm = np.sqrt(vdot(b, b))
    if b_norm == 0.0:
        return np.zeros_like(b)
    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = x0.copy()
        r = b - matvec(x)
    z = inv_diag * r
    d = z.copy()
    rz = vdot(r, z)
    for it in range(prob.max_iter):
        res = np.sqrt(vdot(r, r))
        if res <= prob.tol * b_norm:
            return x
        ad = matvec(d)
        alpha = rz / vdot(d, ad)
        x = x + alpha * d
        r = r - alpha * ad
        z = inv_diag * r
        rz_new = vdot(r, z)
        d = z + (rz_new / rz) * d
        rz = rz_new
    raise SolverFailureError(
        f"CG did not reach tol={prob.tol:g} within {prob.max_iter} iterations",
        residual=float(np.sqrt(vdot(r, r))) / b_norm,
        iterations=prob.max_iter,
    )


def solve(prob: HelmholtzProblem, u: Field, x0: Field | None = None) -> Field:
    """Solve (κ − Δ_h)v = s·u.

    The solution inherits nonnegativity from u (M-matrix inverse) and obeys
    the mass identity ∫v = (s/κ)∫u discretely.  ``x0`` warm-starts the CG
    path (the time stepper passes the previous chemical field).
    """
    if not np.all(np.isfinite(u.values)):
        raise InvalidParameterError("source field contains non-finite values")
    source = prob.source_scale * u.values
    if prob.solver is EllipticSolver.SPECTRAL_COSINE:
        out = _solve_spectral(prob, source)
    else:
        out = _solve_cg(prob, source, None if x0 is None else x0.values)
    return Field(u.grid, out)
