"""Joint order and dimension selection by final prediction error.

The criterion trades the innovation trace of a VAR(p) fit on d score
columns against the variance left outside the first d components, so one
sweep picks p and d together.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, RankDeficiencyError, SelectionError
from .fpca import eigensystem, scores
from .multivar import fit_var_ols, fit_varx_ols


def ffpe(n: int, p: int, d: int, trace_sigma_z: float, tail: float) -> float:
    """Final prediction error (n + p d)/(n - p d) * tr(Sigma_Z) + tail."""
    _check_criterion_args(n, p, d, trace_sigma_z, tail)
    if n <= p * d:
        raise SelectionError(f"criterion undefined: n={n} <= p*d={p * d}")
    return (n + p * d) / (n - p * d) * trace_sigma_z + tail


def ffpex(n: int, p: int, d: int, r: int, trace_sigma_z: float, tail: float) -> float:
    """Criterion variant charging r extra parameters for a covariate block."""
    _check_criterion_args(n, p, d, trace_sigma_z, tail)
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if n <= p * d + r:
        raise SelectionError(f"criterion undefined: n={n} <= p*d + r={p * d + r}")
    return (n + p * d + r) / (n - p * d - r) * trace_sigma_z + tail


def _check_criterion_args(n, p, d, trace_sigma_z, tail):
    if n < 2 or p < 0 or d < 1:
        raise ValueError(f"need n >= 2, p >= 0, d >= 1; got n={n}, p={p}, d={d}")
    if not (math.isfinite(trace_sigma_z) and trace_sigma_z >= 0.0):
        raise ValueError(f"trace_sigma_z must be finite and >= 0, got {trace_sigma_z}")
    if not (math.isfinite(tail) and tail >= 0.0):
        raise ValueError(f"tail must be finite and >= 0, got {tail}")


@dataclass(frozen=True)
class FfpeCell:
    """One (p, d) entry of the criterion sweep."""

    p: int
    d: int
    trace: float
    tail: float
    value: float
    status: str
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class FfpeTable:
    """Criterion values over the (p, d) grid plus the selected cell."""

    n: int
    cells: tuple
    p_best: int
    d_best: int

    @property
    def best(self) -> tuple:
        return self.p_best, self.d_best

    def best_cell(self) -> FfpeCell:
        for cell in self.cells:
            if cell.p == self.p_best and cell.d == self.d_best:
                return cell
        raise LookupError("selected cell missing from table")

    def cell(self, p: int, d: int) -> FfpeCell:
        for c in self.cells:
            if c.p == p and c.d == d:
                return c
        raise LookupError(f"no cell for p={p}, d={d}")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["p", "d", "trace", "tail", "ffpe", "status"])
            for c in self.cells:
                if c.ok:
                    writer.writerow(
                        [c.p, c.d, repr(float(c.trace)), repr(float(c.tail)),
                         repr(float(c.value)), c.status]
                    )
                else:
                    writer.writerow([c.p, c.d, "", "", "", c.status])


def select_pd(data, p_max: int, d_max: int, covariate_scores=None) -> FfpeTable:
    """Sweep the criterion over p = 0..p_max and d = 1..d_max.

    The eigensystem is computed once at d_max and sliced per cell.  Cells
    that cannot be fitted (too few observations, or a rank-deficient
    design) are recorded with a status instead of aborting the sweep.
    Ties in the criterion prefer smaller d, then smaller p.

    Parameters
    ----------
    data : FunctionalDataset
        Observed curves.
    p_max, d_max : int
        Upper corners of the sweep grid.
    covariate_scores : array_like, optional
        (n, r) numeric covariate rows; when given the fits include the
        previous covariate row and the criterion charges r parameters.

    Returns
    -------
    FfpeTable
    """
    if p_max < 0 or d_max < 1:
        raise ValueError(f"need p_max >= 0 and d_max >= 1, got {p_max}, {d_max}")
    n = data.n
    eig = eigensystem(data, d_max)
    smat = scores(data, eig).scores
    r = 0
    if covariate_scores is not None:
        covariate_scores = np.asarray(covariate_scores, dtype=float)
        if covariate_scores.ndim == 1:
            covariate_scores = covariate_scores[:, None]
        if covariate_scores.shape[0] != n:
            raise ValueError(
                f"covariate rows ({covariate_scores.shape[0]}) must match n={n}"
            )
        r = covariate_scores.shape[1]
    cells = []
    for d in range(1, d_max + 1):
        tail = eig.tail_variance(d)
        cols = smat[:, :d]
        for p in range(0, p_max + 1):
            if n <= p * d + r:
                cells.append(
                    FfpeCell(p, d, math.nan, math.nan, math.nan, "invalid", f"n={n} <= p*d+r")
                )
                continue
            try:
                if covariate_scores is None:
                    model = fit_var_ols(cols, p)
                    trace = float(model.sigma_z.trace())
                    value = ffpe(n, p, d, trace, tail)
                else:
                    model = fit_varx_ols(cols, covariate_scores, p)
                    trace = float(model.sigma_z.trace())
                    value = ffpex(n, p, d, r, trace, tail)
            except (InsufficientDataError, RankDeficiencyError, SelectionError) as err:
                status = "singular" if isinstance(err, RankDeficiencyError) else "invalid"
                cells.append(FfpeCell(p, d, math.nan, math.nan, math.nan, status, str(err)))
                continue
            cells.append(FfpeCell(p, d, trace, tail, value, "ok"))
    fitted = [c for c in cells if c.ok]
    if not fitted:
        raise SelectionError(
            f"no (p, d) cell could be fitted for p_max={p_max}, d_max={d_max}, n={n}"
        )
    winner = min(fitted, key=lambda c: (c.value, c.d, c.p))
    return FfpeTable(n=n, cells=tuple(cells), p_best=winner.p, d_best=winner.d)
