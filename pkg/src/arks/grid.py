"""Cell-centered finite-volume grids with Neumann-respecting discrete calculus.

Two grid families are supported:

* tensor grids — uniform cells on an interval or rectangle; these admit the
  cosine-spectral transforms used elsewhere,
* radial grids — a radially symmetric 1D reduction of a disk (n=2) or ball
  (n=3), with annulus/shell cell volumes and the conservative radial Laplacian
  in flux form.

All boundary conditions are zero-flux: boundary faces simply carry no flux, so
the discrete divergence theorem holds exactly up to rounding.
"""

from __future__ import annotations

import enum
import hashlib
import struct

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "Geometry",
    "Grid",
    "Field",
    "interval",
    "rectangle",
    "radial_disk",
    "radial_ball",
    "constant_field",
    "field_from_function",
    "integrate",
    "lp_norm",
    "gradient_sq_integral",
    "gradient_magnitude",
    "neumann_laplacian",
    "write_field",
    "read_field",
    "write_field_csv",
]


class Geometry(enum.Enum):
    INTERVAL = "interval"
    RECTANGLE = "rectangle"
    RADIAL_DISK = "radial-disk"
    RADIAL_BALL = "radial-ball"


_SPATIAL_DIM = {
    Geometry.INTERVAL: 1,
    Geometry.RECTANGLE: 2,
    Geometry.RADIAL_DISK: 2,
    Geometry.RADIAL_BALL: 3,
}

_GEOMETRY_TAG = {g: i for i, g in enumerate(Geometry)}
_TAG_GEOMETRY = {i: g for g, i in _GEOMETRY_TAG.items()}


class Grid:
    """Immutable grid description plus precomputed measures.

    Attributes
    ----------
    geometry : Geometry
    extents : tuple of physical lengths per axis (the radius for radial grids)
    cells : tuple of cell counts per axis
    dim : spatial dimension n of the underlying domain
    shape : array shape of fields on this grid
    spacing : uniform cell width per axis
    volume : measure of the domain
    """

    def __init__(self, geometry, extents, cells):
        geometry = Geometry(geometry)
        extents = tuple(float(e) for e in np.atleast_1d(extents))
        cells = tuple(int(c) for c in np.atleast_1d(cells))
        if any(e <= 0 for e in extents):
            raise InvalidParameterError(f"extents must be positive, got {extents}")
        if any(c < 4 for c in cells):
            raise InvalidParameterError(f"need at least 4 cells per axis, got {cells}")
        rank = 2 if geometry is Geometry.RECTANGLE else 1
        if len(extents) != rank or len(cells) != rank:
            raise InvalidParameterError(
                f"{geometry.value} expects {rank} axis extent(s)/cell count(s)"
            )
        self.geometry = geometry
        self.extents = extents
        self.cells = cells
        self.dim = _SPATIAL_DIM[geometry]
        self.shape = cells
        self.spacing = tuple(e / c for e, c in zip(extents, cells))
        self.is_tensor = geometry in (Geometry.INTERVAL, Geometry.RECTANGLE)

        if self.is_tensor:
            self.cell_volume = float(np.prod(self.spacing))
            self.cell_volumes = np.full(self.shape, self.cell_volume)
            self.volume = float(np.prod(extents))
        else:
            n = cells[0]
            dr = self.spacing[0]
            faces = np.arange(n + 1) * dr
            if geometry is Geometry.RADIAL_DISK:
                self.face_areas = 2.0 * np.pi * faces
                vols = np.pi * (faces[1:] ** 2 - faces[:-1] ** 2)
                self.volume = float(np.pi * extents[0] ** 2)
            else:
                self.face_areas = 4.0 * np.pi * faces**2
                vols = (4.0 * np.pi / 3.0) * (faces[1:] ** 3 - faces[:-1] ** 3)
                self.volume = float((4.0 * np.pi / 3.0) * extents[0] ** 3)
            self.cell_volumes = vols
            self.cell_volume = None

    def centers(self):
        """Cell-center coordinates, one 1D array per axis."""
        return tuple(
            (np.arange(c) + 0.5) * h for c, h in zip(self.cells, self.spacing)
        )

    def meshgrid(self):
        return np.meshgrid(*self.centers(), indexing="ij")

    def content_hash(self):
        """Stable hash of the grid definition, recorded in run manifests."""
        payload = struct.pack(
            "<I", _GEOMETRY_TAG[self.geometry]
        ) + struct.pack(f"<{len(self.cells)}I", *self.cells) + struct.pack(
            f"<{len(self.extents)}d", *self.extents
        )
        return hashlib.sha256(payload).hexdigest()[:16]

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.geometry is other.geometry
            and self.extents == other.extents
            and self.cells == other.cells
        )

    def __repr__(self):
        return f"Grid({self.geometry.value}, extents={self.extents}, cells={self.cells})"


def interval(length=1.0, cells=128):
    return Grid(Geometry.INTERVAL, (length,), (cells,))


def rectangle(lengths=(1.0, 1.0), cells=(128, 128)):
    return Grid(Geometry.RECTANGLE, lengths, cells)


def radial_disk(radius=1.0, cells=256):
    return Grid(Geometry.RADIAL_DISK, (radius,), (cells,))


def radial_ball(radius=1.0, cells=256):
    return Grid(Geometry.RADIAL_BALL, (radius,), (cells,))


class Field:
    """One real cell average per grid cell."""

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != grid.shape:
            raise InvalidParameterError(
                f"field shape {values.shape} does not match grid {grid.shape}"
            )
        self.grid = grid
        self.values = values

    def copy(self):
        return Field(self.grid, self.values.copy())

    def __repr__(self):
        return f"Field(grid={self.grid!r}, min={self.values.min():.3g}, max={self.values.max():.3g})"


def constant_field(grid, value):
    return Field(grid, np.full(grid.shape, float(value)))


def field_from_function(grid, fn):
    """Sample ``fn`` at cell centers; ``fn`` takes one coordinate array per axis."""
    return Field(grid, np.asarray(fn(*grid.meshgrid()), dtype=np.float64))


# ---------------------------------------------------------------------------
# discrete calculus


def integrate(f: Field) -> float:
    """Volume-weighted sum of cell averages (pairwise summation order)."""
    g = f.grid
    if g.is_tensor:
        return float(np.sum(f.values) * g.cell_volume)
    return float(np.sum(f.values * g.cell_volumes))


def lp_norm(f: Field, p) -> float:
    """Discrete L^p norm; ``p`` is a real >= 1 or ``np.inf``."""
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(f.values)))
    p = float(p)
    if p < 1.0:
        raise InvalidParameterError(f"p must be >= 1 or inf, got {p}")
    g = f.grid
    a = np.abs(f.values) ** p
    if g.is_tensor:
        total = float(np.sum(a) * g.cell_volume)
    else:
        total = float(np.sum(a * g.cell_volumes))
    return total ** (1.0 / p)


def _face_diffs(f: Field):
    """Interior-face differences divided by spacing, one array per axis."""
    g = f.grid
    return [
        np.diff(f.values, axis=d) / g.spacing[d] for d in range(len(g.cells))
    ]


def gradient_sq_integral(f: Field) -> float:
    """Discrete ∫|∇f|² with face-centered differences; boundary faces carry zero."""
    g = f.grid
    diffs = _face_diffs(f)
    if g.is_tensor:
        return float(sum(np.sum(d * d) for d in diffs) * g.cell_volume)
    dr = g.spacing[0]
    areas = g.face_areas[1:-1]
    d = diffs[0]
    return float(np.sum(d * d * areas) * dr)


def gradient_magnitude(f: Field) -> Field:
    """Cell-centered |∇f| from face-averaged per-axis gradients."""
    g = f.grid
    acc = np.zeros(g.shape)
    for d, gd in enumerate(_face_diffs(f)):
        pad = [(0, 0)] * gd.ndim
        pad[d] = (1, 0)
        left = np.pad(gd, pad)
        pad[d] = (0, 1)
        right = np.pad(gd, pad)
        avg = 0.5 * (left + right)
        acc += avg * avg
    return Field(g, np.sqrt(acc))


def neumann_laplacian(f: Field) -> Field:
    """Flux-form Laplacian with mirrored (zero-flux) boundary faces.

    Radial grids use (1/r^{n-1}) ∂_r (r^{n-1} ∂_r f) in conservative form, so
    integrate(neumann_laplacian(f)) telescopes to zero.
    """
    g = f.grid
    if g.is_tensor:
        out = np.zeros(g.shape)
        for d, gd in enumerate(_face_diffs(f)):
            pad = [(0, 0)] * gd.ndim
            pad[d] = (1, 1)
            flux = np.pad(gd, pad)
            out += (
                np.diff(flux, axis=d) / g.spacing[d]
            )
        return Field(g, out)
    dr = g.spacing[0]
    flux = np.zeros(g.cells[0] + 1)
    flux[1:-1] = g.face_areas[1:-1] * np.diff(f.values) / dr
    return Field(g, np.diff(flux) / g.cell_volumes)


# ---------------------------------------------------------------------------
# serialization

_MAGIC = b"ARKF"
_VERSION = 1


def write_field(f: Field, path):
    """Flat binary snapshot: small header, then row-major float64 values."""
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, _GEOMETRY_TAG[g.geometry]))
        fh.write(struct.pack("<I", len(g.cells)))
        fh.write(struct.pack(f"<{len(g.cells)}I", *g.cells))
        fh.write(struct.pack(f"<{len(g.extents)}d", *g.extents))
        fh.write(np.ascontiguousarray(f.values).tobytes())


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise InvalidParameterError(f"{path} is not a field snapshot")
        version, tag = struct.unpack("<II", fh.read(8))
        if version != _VERSION:
            raise InvalidParameterError(f"unsupported snapshot version {version}")
        (rank,) = struct.unpack("<I", fh.read(4))
        cells = struct.unpack(f"<{rank}I", fh.read(4 * rank))
        extents = struct.unpack(f"<{rank}d", fh.read(8 * rank))
        grid = Grid(_TAG_GEOMETRY[tag], extents, cells)
        values = np.frombuffer(fh.read(), dtype=np.float64).reshape(cells)
    return Field(grid, values.copy())


def write_field_csv(f: Field, path):
    """Coordinates-plus-value rows, shortest round-trip float formatting."""
    g = f.grid
    axes = g.meshgrid()
    names = {1: ["x"], 2: ["x", "y"]}[len(g.cells)]
    if not g.is_tensor:
        names = ["r"]
    with open(path, "w") as fh:
        fh.write(",".join(names + ["value"]) + "\n")
        cols = [a.ravel() for a in axes] + [f.values.ravel()]
        for row in zip(*cols):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
