"""Curves on a shared midpoint grid and L2([0, 1]) primitives.

A curve is a row of T samples taken at t_i = (i - 1/2)/T, so integrals
reduce to plain averages and the covariance operator of a dataset becomes
a symmetric T x T matrix problem.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, IngestError, ResolutionError


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Grid:
    """Equispaced midpoint grid t_i = (i - 1/2)/T on [0, 1]."""

    T: int
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 2:
            raise ValueError(f"grid needs an integer T >= 2, got {self.T!r}")
        object.__setattr__(self, "T", int(self.T))
        pts = (np.arange(self.T) + 0.5) / self.T
        object.__setattr__(self, "points", _readonly(pts))

    @property
    def spacing(self) -> float:
        return 1.0 / self.T


def inner_product(f, g, grid: Grid) -> float:
    """Midpoint-rule inner product (1/T) * sum(f * g)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (grid.T,) or g.shape != (grid.T,):
        raise DimensionMismatchError(
            f"expected two length-{grid.T} samples, got {f.shape} and {g.shape}"
        )
    return float(f @ g) / grid.T


def l2_norm(f, grid: Grid) -> float:
    """Norm induced by :func:`inner_product`."""
    return float(np.sqrt(inner_product(f, f, grid)))


@dataclass(frozen=True)
class FunctionalDataset:
    """n curves sampled on a common grid, stored as an (n, T) array."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] < 1:
            raise ValueError(f"values must be a nonempty (n, T) array, got shape {vals.shape}")
        if vals.shape[1] != self.grid.T:
            raise DimensionMismatchError(
                f"curves have {vals.shape[1]} samples but the grid has T={self.grid.T}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve values must be finite")
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.grid.T


@dataclass(frozen=True)
class FourierBasis:
    """First D elements of the Fourier basis sampled on a grid.

    Row 1 is the constant function, rows 2j and 2j + 1 are
    sqrt(2) sin(2 pi j t) and sqrt(2) cos(2 pi j t).  Unit norms and
    pairwise orthogonality hold under the grid inner product as long as
    T >= 8 D, which the constructor enforces.
    """

    D: int
    grid: Grid
    values: np.ndarray = field(repr=False)


def make_fourier_basis(D: int, grid: Grid) -> FourierBasis:
    if D < 1:
        raise ValueError(f"basis size must be >= 1, got {D}")
    if grid.T < 8 * D:
        raise ResolutionError(f"T={grid.T} is too coarse for D={D}; need T >= 8*D")
    t = grid.points
    rows = np.empty((D, grid.T))
    rows[0] = 1.0
    for idx in range(1, D):
        j = (idx + 1) // 2
        if idx % 2 == 1:
            rows[idx] = np.sqrt(2.0) * np.sin(2.0 * np.pi * j * t)
        else:
            rows[idx] = np.sqrt(2.0) * np.cos(2.0 * np.pi * j * t)
    return FourierBasis(D=D, grid=grid, values=_readonly(rows))


def synthesize(coeffs, basis: FourierBasis) -> FunctionalDataset:
    """Assemble curves sum_l c_l e_l from coefficient rows."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    if coeffs.shape[1] != basis.D:
        raise DimensionMismatchError(
            f"coefficient rows have length {coeffs.shape[1]}, basis has D={basis.D}"
        )
    return FunctionalDataset(grid=basis.grid, values=coeffs @ basis.values)


def save_curves_csv(data: FunctionalDataset, path, header: bool = True) -> None:
    """Write one curve per row; optional header row t_1,...,t_T."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow([f"t_{i + 1}" for i in range(data.T)])
        for row in data.values:
            writer.writerow([repr(float(v)) for v in row])


def load_curves_csv(path) -> FunctionalDataset:
    """Read a curve-per-row CSV written by :func:`save_curves_csv`.

    A single leading header row is detected and skipped.  Missing or
    non-numeric cells are rejected; use ingest() for raw files that
    need cleaning.
    """
    rows = _read_numeric_rows(path)
    if not rows:
        raise IngestError(f"{path}: no curve rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise IngestError(f"{path}: inconsistent row lengths {sorted(widths)}")
    values = np.array(rows, dtype=float)
    if not np.all(np.isfinite(values)):
        raise IngestError(f"{path}: file contains missing or non-finite cells")
    return FunctionalDataset(grid=Grid(values.shape[1]), values=values)


def _read_numeric_rows(path):
    with open(path, newline="") as fh:
        raw = [row for row in csv.reader(fh) if row]
    if not raw:
        return []
    if _looks_like_header(raw[0]):
        raw = raw[1:]
    out = []
    for row in raw:
        out.append([_parse_cell(c) for c in row])
    return out


def _looks_like_header(row) -> bool:
    for cell in row:
        cell = cell.strip()
        if cell == "":
            continue
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _parse_cell(cell: str) -> float:
    cell = cell.strip()
    if cell == "" or cell.lower() in ("na", "nan"):
        return np.nan
    return float(cell)
