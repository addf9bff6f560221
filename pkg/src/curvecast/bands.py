"""Uniform prediction bands from rolling one-step residuals.

The band around a forecast is gamma(t) scaled by constants calibrated so
that a target fraction of historical standardized residuals fits inside
over the whole grid at once.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import FunctionalDataset, Grid, _readonly
from .errors import InsufficientDataError
from .fpca import ScoreMatrix, eigensystem, reconstruct, scores
from .multivar import fit_var_ols, predict_var

# Grid points with essentially zero spread carry no band information.
GAMMA_FLOOR_RTOL = 1e-12


def rolling_residuals(data: FunctionalDataset, d: int, p: int, L: int = None) -> FunctionalDataset:
    """One-step prediction residuals over the tail of the sample.

    Eigenfunctions and scores come from the full sample; for each
    k = L+1..n the score model is refitted on the first k - 1 rows and
    the residual Y_k minus its prediction is recorded, giving n - L
    residual curves.  The default L is max(p, 10 d, n/4), large enough
    for the early fits to be stable.
    """
    n = data.n
    if L is None:
        L = max(p, 10 * d, round(n / 4))
    if L < max(p, 10 * d):
        raise ValueError(f"L={L} below the warm-up floor max(p, 10*d)={max(p, 10 * d)}")
    if L >= n - 1:
        raise InsufficientDataError(f"L={L} leaves fewer than two of n={n} curves")
    eig = eigensystem(data, d)
    smat = scores(data, eig).scores
    resid = np.empty((n - L, data.T))
    for i, k in enumerate(range(L, n)):
        pred = predict_var(fit_var_ols(smat[:k], p), smat[:k][-max(p, 1) :], 1)
        curve = reconstruct(ScoreMatrix(scores=pred[None, :]), eig).values[0]
        resid[i] = data.values[k] - curve
    return FunctionalDataset(grid=data.grid, values=resid)


@dataclass(frozen=True)
class PredictionBand:
    """Scaled-spread band: forecast - xi_lower*gamma to forecast + xi_upper*gamma."""

    grid: Grid
    gamma: np.ndarray = field(repr=False)
    xi_lower: float
    xi_upper: float
    alpha: float
    M: int

    def offsets(self):
        return self.xi_lower * self.gamma, self.xi_upper * self.gamma

    def to_csv(self, path) -> None:
        lower, upper = self.offsets()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "gamma", "lower_offset", "upper_offset"])
            for t, g, lo, up in zip(self.grid.points, self.gamma, lower, upper):
                writer.writerow([repr(float(v)) for v in (t, g, lo, up)])

    def contains(self, center, curve) -> bool:
        """Whole-grid check of center - lower <= curve <= center + upper."""
        center = np.asarray(center, dtype=float)
        curve = np.asarray(curve, dtype=float)
        lower, upper = self.offsets()
        return bool(
            np.all(curve >= center - lower - 1e-12) and np.all(curve <= center + upper + 1e-12)
        )


def _order_statistic(values: np.ndarray, alpha: float) -> float:
    m = values.shape[0]
    # ceil with a guard against float roundoff in alpha * m
    rank = int(math.ceil(alpha * m - 1e-9))
    rank = min(max(rank, 1), m)
    return float(np.sort(values)[rank - 1])


def prediction_band(residuals: FunctionalDataset, alpha: float, symmetric: bool = True) -> PredictionBand:
    """Calibrate band constants from residual curves.

    gamma(t) is the pointwise sample standard deviation.  In the
    symmetric case the constant is the ceil(alpha * M)-th order statistic
    of the per-residual sup of |residual| / gamma, so at least alpha of
    the residuals fit inside their own band.  The asymmetric case scales
    the two sides proportionally along the direction given by the
    alpha-quantiles of the per-side statistics.

    Parameters
    ----------
    residuals : FunctionalDataset
        M >= 10 residual curves.
    alpha : float
        Target coverage level in (0, 1).
    symmetric : bool
        Single constant for both sides, or a per-side pair.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    vals = residuals.values
    m = vals.shape[0]
    if m < 10:
        raise InsufficientDataError(f"need at least 10 residual curves, got {m}")
    gamma = vals.std(axis=0, ddof=1)
    gmax = float(gamma.max())
    if gmax == 0.0:
        if np.any(vals != 0.0):
            raise ValueError("pointwise spread is identically zero but residuals are not")
        return PredictionBand(
            grid=residuals.grid, gamma=_readonly(gamma), xi_lower=0.0, xi_upper=0.0,
            alpha=alpha, M=m,
        )
    use = gamma >= GAMMA_FLOOR_RTOL * gmax
    ratio = vals[:, use] / gamma[use]
    if symmetric:
        sup = np.max(np.abs(ratio), axis=1)
        xi = _order_statistic(sup, alpha)
        return PredictionBand(
            grid=residuals.grid, gamma=_readonly(gamma), xi_lower=xi, xi_upper=xi,
            alpha=alpha, M=m,
        )
    low = np.max(-ratio, axis=1)
    high = np.max(ratio, axis=1)
    q_low = max(_order_statistic(low, alpha), 0.0)
    q_high = max(_order_statistic(high, alpha), 0.0)
    if q_low == 0.0 and q_high == 0.0:
        q_low = q_high = 1.0
    elif q_low == 0.0:
        q_low = q_high
    elif q_high == 0.0:
        q_high = q_low
    scale_needed = np.maximum(low / q_low, high / q_high)
    s = max(_order_statistic(scale_needed, alpha), 0.0)
    return PredictionBand(
        grid=residuals.grid, gamma=_readonly(gamma), xi_lower=s * q_low, xi_upper=s * q_high,
        alpha=alpha, M=m,
    )
