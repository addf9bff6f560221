"""Principal component analysis for curve datasets.

Estimates the mean curve and covariance kernel, solves the discretized
eigenproblem, projects curves to score vectors, and rebuilds curves from
truncated score expansions.
"""

from dataclasses import dataclass, field

import numpy as np

from .curves import FunctionalDataset, Grid, _readonly
from .errors import DimensionMismatchError, InsufficientDataError


def sample_mean(data: FunctionalDataset) -> np.ndarray:
    """Pointwise average curve."""
    return data.values.mean(axis=0)


def sample_covariance_kernel(data: FunctionalDataset) -> np.ndarray:
    """Discretized covariance kernel K[i, j] = mean of centered products.

    Uses divisor n.  Requires at least two curves; a single curve has no
    covariance structure to estimate.
    """
    if data.n < 2:
        raise InsufficientDataError(f"covariance needs n >= 2 curves, got n={data.n}")
    centered = data.values - sample_mean(data)
    return centered.T @ centered / data.n


@dataclass(frozen=True)
class EigenSystem:
    """Leading eigenpairs of the sample covariance operator.

    Eigenfunctions are stored as rows, have unit norm under the grid
    inner product, and carry a deterministic sign: the sample point with
    the largest absolute value is positive.  total_variance is the full
    trace of the covariance operator, independent of the truncation d.
    """

    grid: Grid
    mean: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    eigenfunctions: np.ndarray = field(repr=False)
    total_variance: float

    @property
    def d(self) -> int:
        return self.eigenvalues.shape[0]

    def truncate(self, d: int) -> "EigenSystem":
        if not 1 <= d <= self.d:
            raise ValueError(f"cannot truncate to d={d}, system holds {self.d} pairs")
        return EigenSystem(
            grid=self.grid,
            mean=self.mean,
            eigenvalues=self.eigenvalues[:d],
            eigenfunctions=self.eigenfunctions[:d],
            total_variance=self.total_variance,
        )

    def tail_variance(self, d: int | None = None) -> float:
        """Variance not explained by the first d components."""
        d = self.d if d is None else d
        tail = self.total_variance - float(np.sum(self.eigenvalues[:d]))
        return max(tail, 0.0)


def _fix_signs(funcs: np.ndarray) -> np.ndarray:
    for row in funcs:
        anchor = np.argmax(np.abs(row))
        s = np.sign(row[anchor])
        if s < 0:
            row *= -1.0
    return funcs


def eigensystem(data: FunctionalDataset, d: int) -> EigenSystem:
    """Solve the discretized eigenproblem (1/T) K v = lambda v.

    Parameters
    ----------
    data : FunctionalDataset
        Sample of n >= 2 curves.
    d : int
        Number of leading eigenpairs to keep, 1 <= d <= min(n - 1, T).

    Returns
    -------
    EigenSystem
        Eigenvalues in nonincreasing order with eigenfunctions scaled to
        unit grid norm.
    """
    ceiling = min(data.n - 1, data.T)
    if not 1 <= d <= ceiling:
        raise ValueError(f"d={d} outside valid range 1..{ceiling} for n={data.n}, T={data.T}")
    kernel = sample_covariance_kernel(data)
    evals, evecs = np.linalg.eigh(kernel / data.T)
    order = np.argsort(evals)[::-1][:d]
    lams = np.maximum(evals[order], 0.0)
    # eigh vectors have unit Euclidean norm; rescale to unit grid norm
    funcs = _fix_signs(evecs[:, order].T * np.sqrt(data.T))
    return EigenSystem(
        grid=data.grid,
        mean=_readonly(sample_mean(data)),
        eigenvalues=_readonly(lams),
        eigenfunctions=_readonly(funcs),
        total_variance=float(np.trace(kernel)) / data.T,
    )


def pve_dimension(data: FunctionalDataset, threshold: float) -> int:
    """Smallest d whose leading eigenvalues explain >= threshold of variance."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    kernel = sample_covariance_kernel(data)
    evals = np.sort(np.linalg.eigvalsh(kernel / data.T))[::-1]
    evals = np.maximum(evals, 0.0)
    total = float(np.trace(kernel)) / data.T
    if total <= 0.0:
        return 1
    ratio = np.cumsum(evals) / total
    hits = np.nonzero(ratio >= threshold - 1e-12)[0]
    if hits.size == 0:
        raise InsufficientDataError(
            f"even {evals.size} components explain only {ratio[-1]:.4f} < {threshold}"
        )
    return int(hits[0]) + 1


@dataclass(frozen=True)
class ScoreMatrix:
    """Projections of centered curves onto eigenfunctions, one row per curve."""

    scores: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=float)
        if s.ndim != 2:
            raise ValueError(f"scores must be an (n, d) array, got shape {s.shape}")
        object.__setattr__(self, "scores", _readonly(s))

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def d(self) -> int:
        return self.scores.shape[1]


def scores(data: FunctionalDataset, eig: EigenSystem) -> ScoreMatrix:
    """Score matrix with entries <Y_k - mean, v_l> under the grid inner product."""
    if data.grid.T != eig.grid.T:
        raise DimensionMismatchError(
            f"data grid T={data.grid.T} does not match eigensystem grid T={eig.grid.T}"
        )
    centered = data.values - eig.mean
    return ScoreMatrix(scores=centered @ eig.eigenfunctions.T / data.T)


def reconstruct(score_matrix: ScoreMatrix, eig: EigenSystem) -> FunctionalDataset:
    """Truncated expansion mean + sum_l y_l v_l for each score row."""
    s = score_matrix.scores
    if s.shape[1] != eig.d:
        raise DimensionMismatchError(
            f"scores have d={s.shape[1]} columns but the eigensystem holds {eig.d}"
        )
    return FunctionalDataset(grid=eig.grid, values=eig.mean + s @ eig.eigenfunctions)
