"""Measure-valued organism data, chemical initial data, and their mollification.

The organism datum is a nonnegative cell measure: Dirac atoms snapped to the
nearest cell center plus an optional density from a fixed catalog.  Smoothing
uses the heat semigroup, which conserves the organism mass exactly in flux
form; chemicals are smoothed by the damped semigroup e^{ε(Δ−κ)} with their own
decay rates, which can only shrink their mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import semigroup
from .errors import InvalidParameterError, MisuseError
from .grid import Field, Grid, integrate
from .model import ModelParams

__all__ = [
    "DensitySpec",
    "MeasureSpec",
    "ChemicalInitialData",
    "DENSITY_KINDS",
    "density_field",
    "build_raw_measure",
    "mollify_measure",
    "mollify_chemicals",
]

DENSITY_KINDS = ("constant", "gaussian", "cosine-bump")


@dataclass(frozen=True)
class DensitySpec:
    """Named density from the fixed catalog; arbitrary closures are out of scope."""

    kind: str
    amplitude: float = 1.0
    center: tuple = ()
    width: float = 0.25

    def __post_init__(self):
        if self.kind not in DENSITY_KINDS:
            raise InvalidParameterError(
                f"unknown density kind {self.kind!r}; catalog: {DENSITY_KINDS}"
            )
        if self.amplitude < 0:
            raise InvalidParameterError("density amplitude must be >= 0")
        if self.width <= 0:
            raise InvalidParameterError("density width must be > 0")


def _center_for(grid: Grid, spec: DensitySpec):
    if spec.center:
        return tuple(float(c) for c in spec.center)
    if grid.is_tensor:
        return tuple(e / 2 for e in grid.extents)
    return (0.0,)


def density_field(grid: Grid, spec: DensitySpec) -> Field:
    coords = grid.meshgrid()
    center = _center_for(grid, spec)
    if spec.kind == "constant":
        return Field(grid, np.full(grid.shape, spec.amplitude))
    r2 = sum((x - c) ** 2 for x, c in zip(coords, center))
    if spec.kind == "gaussian":
        return Field(grid, spec.amplitude * np.exp(-r2 / (2 * spec.width**2)))
    # cosine-bump: C^1, compactly supported on |x - c| <= width
    s = np.minimum(np.sqrt(r2) / spec.width, 1.0)
    return Field(grid, spec.amplitude * np.cos(0.5 * np.pi * s) ** 2)


@dataclass(frozen=True)
class MeasureSpec:
    """Atoms (location, mass > 0) plus an optional nonnegative density."""

    atoms: tuple = ()
    density: DensitySpec | None = None

    def __post_init__(self):
        for atom in self.atoms:
            *loc, mass = atom
            if mass <= 0:
                raise InvalidParameterError(f"atom mass must be > 0, got {mass}")

    def validate_on(self, grid: Grid):
        for atom in self.atoms:
            *loc, _ = atom
            if grid.is_tensor:
                if len(loc) != len(grid.extents):
                    raise InvalidParameterError(
                        f"atom location {loc} has wrong dimension for {grid.geometry.value}"
                    )
                for x, L in zip(loc, grid.extents):
                    if not 0.0 < x < L:
                        raise InvalidParameterError(
                            f"atom location {loc} is not strictly inside the domain"
                        )
            else:
                (r,) = loc
                if not 0.0 <= r < grid.extents[0]:
                    raise InvalidParameterError(
                        f"atom radius {r} is not strictly inside the domain"
                    )
        if not self.atoms and self.density is None:
            raise InvalidParameterError("measure needs atoms, a density, or both")


def build_raw_measure(spec: MeasureSpec, grid: Grid) -> tuple[Field, float]:
    """Cell-measure representation of the datum and its total mass.

    Atoms snap to the nearest cell center (an O(h) placement error, dominated
    by mollification whenever eps >> h^2); the density is sampled at centers.
    """
    spec.validate_on(grid)
    values = np.zeros(grid.shape)
    vols = grid.cell_volumes
    for atom in spec.atoms:
        *loc, mass = atom
        idx = tuple(
            min(int(x / h), c - 1)
            for x, h, c in zip(loc, grid.spacing, grid.cells)
        )
        values[idx] += mass / vols[idx]
    if spec.density is not None:
        dens = density_field(grid, spec.density)
        if np.min(dens.values) < 0:
            raise InvalidParameterError("density must be nonnegative")
        values += dens.values
    raw = Field(grid, values)
    mass_total = integrate(raw)
    if mass_total <= 0:
        raise InvalidParameterError("total mass must be > 0")
    return raw, mass_total


def mollify_measure(
    spec: MeasureSpec,
    eps: float,
    grid: Grid,
    plan: semigroup.SemigroupPlan | None = None,
) -> Field:
    """Heat-semigroup smoothing of the cell measure; mass is preserved."""
    if eps <= 0:
        raise InvalidParameterError(f"mollification eps must be > 0, got {eps}")
    raw, _ = build_raw_measure(spec, grid)
    if plan is None:
        plan = semigroup.make_plan(grid)
    return semigroup.apply(plan, raw, eps)


@dataclass(frozen=True)
class ChemicalInitialData:
    v0: Field
    w0: Field

    def __post_init__(self):
        if np.min(self.v0.values) < 0 or np.min(self.w0.values) < 0:
            raise InvalidParameterError("chemical initial data must be nonnegative")


def mollify_chemicals(
    cd: ChemicalInitialData,
    eps: float,
    params: ModelParams,
    grid: Grid,
    plan: semigroup.SemigroupPlan | None = None,
) -> tuple[Field, Field]:
    """Damped smoothing (e^{ε(Δ−β)}v0, e^{ε(Δ−δ)}w0); parabolic chemicals only."""
    if params.tau != 1:
        raise MisuseError("chemical mollification applies to the parabolic case only")
    if eps <= 0:
        raise InvalidParameterError(f"mollification eps must be > 0, got {eps}")
    if plan is None:
        plan = semigroup.make_plan(grid)
    v = semigroup.apply(plan, cd.v0, eps, kappa=params.beta)
    w = semigroup.apply(plan, cd.w0, eps, kappa=params.delta)
    return v, w
