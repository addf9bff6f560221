"""Multivariate time series machinery for score vectors.

Autocovariance estimation, least-squares VAR fitting with optional
exogenous regressors, iterated prediction, the innovations recursion,
and the closed-form best linear predictor built from covariance blocks.
All functions operate on plain (n, d) arrays in time order.
"""

from dataclasses import dataclass, field

import numpy as np

from .curves import _readonly
from .errors import (
    IllConditionedError,
    InsufficientDataError,
    NumericalDegeneracyError,
    RankDeficiencyError,
)

# Relative pivot threshold below which solves refuse to proceed.
PIVOT_RTOL = 1e-12


def _as_score_array(x) -> np.ndarray:
    x = np.asarray(getattr(x, "scores", x), dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"expected an (n, d) score array, got shape {x.shape}")
    return x


def _guarded_solve(gram: np.ndarray, rhs: np.ndarray, context: str):
    """Solve gram @ x = rhs, failing loudly near singularity."""
    u, s, _ = np.linalg.svd(gram)
    if s[0] <= 0.0 or s[-1] < PIVOT_RTOL * s[0]:
        null = u[:, -1]
        column = int(np.argmax(np.abs(null)))
        raise RankDeficiencyError(
            f"{context}: matrix is numerically singular "
            f"(smallest/largest singular value {s[-1]:.3e}/{s[0]:.3e}), "
            f"degenerate direction loads on column {column}",
            column=column,
        )
    return np.linalg.solve(gram, rhs)


@dataclass(frozen=True)
class AcvfSequence:
    """Autocovariances Gamma(0..max_lag) with Gamma(-k) = Gamma(k)^T."""

    gammas: np.ndarray
    mean: np.ndarray = None

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 3 or g.shape[1] != g.shape[2]:
            raise ValueError(f"gammas must be (m + 1, d, d), got shape {g.shape}")
        mean = np.zeros(g.shape[1]) if self.mean is None else np.asarray(self.mean, dtype=float)
        if mean.shape != (g.shape[1],):
            raise ValueError(f"mean must have length d={g.shape[1]}")
        object.__setattr__(self, "gammas", _readonly(g))
        object.__setattr__(self, "mean", _readonly(mean))

    @property
    def max_lag(self) -> int:
        return self.gammas.shape[0] - 1

    @property
    def d(self) -> int:
        return self.gammas.shape[1]

    def gamma(self, k: int) -> np.ndarray:
        if abs(k) > self.max_lag:
            raise ValueError(f"lag {k} beyond stored max_lag {self.max_lag}")
        return self.gammas[k] if k >= 0 else self.gammas[-k].T


def sample_acvf(scores, max_lag: int) -> AcvfSequence:
    """Autocovariance estimates with divisor n at every lag.

    Gamma_hat(k) = (1/n) sum_{j=1}^{n-k} (Y_{j+k} - Ybar)(Y_j - Ybar)^T,
    which keeps the block-Toeplitz covariance built from the sequence
    positive semidefinite.
    """
    s = _as_score_array(scores)
    n = s.shape[0]
    if not 0 <= max_lag < n:
        raise InsufficientDataError(f"max_lag={max_lag} needs 0 <= max_lag < n={n}")
    mean = s.mean(axis=0)
    c = s - mean
    gammas = np.empty((max_lag + 1, s.shape[1], s.shape[1]))
    for k in range(max_lag + 1):
        gammas[k] = c[k:].T @ c[: n - k] / n
    return AcvfSequence(gammas=gammas, mean=mean)


@dataclass(frozen=True)
class VarModel:
    """Fitted VAR(p), optionally with a one-lag exogenous block.

    coeffs holds Phi_1..Phi_p.  mean is the sample mean removed before
    fitting (zero when the input was already centered); predictions add
    it back.  sigma_z is the innovation covariance estimate.
    """

    p: int
    coeffs: tuple
    sigma_z: np.ndarray
    mean: np.ndarray
    theta: np.ndarray = None
    covariate_mean: np.ndarray = None

    @property
    def d(self) -> int:
        return self.sigma_z.shape[0]

    @property
    def r(self) -> int:
        return 0 if self.theta is None else self.theta.shape[1]


def fit_var_ols(scores, p: int) -> VarModel:
    """Least-squares VAR(p) fit on centered score rows.

    Stacks equations for k = p+1..n with regressor rows
    (y_{k-1}, ..., y_{k-p}); no intercept is estimated beyond removing
    the sample mean.  The innovation covariance uses divisor n - p.
    """
    s = _as_score_array(scores)
    n, d = s.shape
    if p < 0:
        raise ValueError(f"order p must be >= 0, got {p}")
    if n < 2 or (p > 0 and n <= p * d + 1):
        raise InsufficientDataError(f"n={n} too small to fit p={p}, d={d}")
    mean = s.mean(axis=0)
    c = s - mean
    if p == 0:
        sigma = c.T @ c / n
        return VarModel(p=0, coeffs=(), sigma_z=_readonly(sigma), mean=_readonly(mean))
    design = np.hstack([c[p - j - 1 : n - j - 1] for j in range(p)])
    target = c[p:]
    gram = design.T @ design
    beta = _guarded_solve(gram, design.T @ target, context=f"VAR({p}) design")
    resid = target - design @ beta
    sigma = resid.T @ resid / (n - p)
    coeffs = tuple(_readonly(beta[j * d : (j + 1) * d].T) for j in range(p))
    return VarModel(p=p, coeffs=coeffs, sigma_z=_readonly(sigma), mean=_readonly(mean))


def fit_varx_ols(scores, covariates, p: int) -> VarModel:
    """VAR(p) fit with the previous covariate row appended as regressors.

    Equation for y_k uses (y_{k-1}, ..., y_{k-p}, r_{k-1}), so stacking
    starts at k = max(p, 1) + 1.  Covariate columns that are exactly
    constant carry no information and are excluded from the solve; their
    loadings are returned as zero.
    """
    s = _as_score_array(scores)
    rmat = _as_score_array(covariates)
    n, d = s.shape
    if rmat.shape[0] != n:
        raise ValueError(f"covariates have {rmat.shape[0]} rows, scores have {n}")
    if p < 0:
        raise ValueError(f"order p must be >= 0, got {p}")
    r = rmat.shape[1]
    start = max(p, 1)
    if n <= p * d + r + 1 or n - start < 2:
        raise InsufficientDataError(f"n={n} too small to fit p={p}, d={d}, r={r}")
    mean = s.mean(axis=0)
    rmean = rmat.mean(axis=0)
    c = s - mean
    rc = rmat - rmean
    keep = np.nonzero(np.max(np.abs(rc), axis=0) > 0.0)[0]
    blocks = [c[start - j - 1 : n - j - 1] for j in range(p)]
    blocks.append(rc[start - 1 : n - 1][:, keep])
    design = np.hstack(blocks)
    target = c[start:]
    if design.shape[1] == 0:
        beta = np.zeros((0, d))
        resid = target
    else:
        gram = design.T @ design
        beta = _guarded_solve(gram, design.T @ target, context=f"VARX({p}) design")
        resid = target - design @ beta
    sigma = resid.T @ resid / (n - start)
    coeffs = tuple(_readonly(beta[j * d : (j + 1) * d].T) for j in range(p))
    theta = np.zeros((d, r))
    theta[:, keep] = beta[p * d :].T
    return VarModel(
        p=p,
        coeffs=coeffs,
        sigma_z=_readonly(sigma),
        mean=_readonly(mean),
        theta=_readonly(theta),
        covariate_mean=_readonly(rmean),
    )


def predict_var(model: VarModel, history, h: int = 1, covariate=None) -> np.ndarray:
    """Iterated h-step prediction from the most recent score rows.

    history rows are in time order with the newest last; at least p rows
    are required.  With an exogenous block only h = 1 is defined and the
    current covariate row must be supplied.
    """
    if h < 1:
        raise ValueError(f"horizon must be >= 1, got {h}")
    hist = np.asarray(history, dtype=float)
    if hist.ndim == 1:
        # a flat vector is one observation unless the model is univariate
        hist = hist.reshape(-1, 1) if model.d == 1 else hist[None, :]
    if hist.size == 0:
        hist = hist.reshape(0, model.d)
    if hist.shape[1] != model.d:
        raise ValueError(f"history rows have length {hist.shape[1]}, model has d={model.d}")
    if hist.shape[0] < model.p:
        raise InsufficientDataError(f"need at least p={model.p} history rows, got {hist.shape[0]}")
    if model.theta is not None:
        if h != 1:
            raise ValueError("exogenous block supports one-step prediction only")
        if covariate is None:
            raise ValueError("model carries an exogenous block; pass its current row")
    elif covariate is not None:
        raise ValueError("model has no exogenous block but a covariate row was passed")
    buf = [row for row in hist - model.mean]
    pred = np.zeros(model.d)
    for _ in range(h):
        pred = np.zeros(model.d)
        for j, phi in enumerate(model.coeffs, start=1):
            pred = pred + phi @ buf[-j]
        buf.append(pred)
    if model.theta is not None:
        rc = np.asarray(covariate, dtype=float) - model.covariate_mean
        pred = pred + model.theta @ rc
    return pred + model.mean


def solve_blp_with_covariates(acvf: AcvfSequence, cross=None, gamma_rr=None, m: int = 1):
    """Best linear predictor coefficients from covariance blocks.

    Solves the stacked normal equations for predicting Y_{n+1} from
    (Y_n, ..., Y_{n+1-m}) and, when covariance blocks with a covariate
    are supplied, from R_n as well.

    Parameters
    ----------
    acvf : AcvfSequence
        Autocovariances of Y up to lag m at least.
    cross : array_like, optional
        Stack of m + 1 cross-covariance blocks, cross[k] = Gamma_YR(1 - k)
        for k = 0..m where Gamma_YR(i) = Cov(Y_t, R_{t-i}).
    gamma_rr : array_like, optional
        Covariance of the covariate vector, required with cross.
    m : int
        Number of Y lags entering the predictor.

    Returns
    -------
    (phis, theta)
        phis is a list of m (d, d) matrices; theta is the (d, r)
        covariate loading, or None when no covariate blocks were given.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if acvf.max_lag < m:
        raise ValueError(f"need autocovariances up to lag {m}, have {acvf.max_lag}")
    d = acvf.d
    if (cross is None) != (gamma_rr is None):
        raise ValueError("cross and gamma_rr must be supplied together")
    r = 0
    if cross is not None:
        cross = np.asarray(cross, dtype=float)
        gamma_rr = np.asarray(gamma_rr, dtype=float)
        if cross.ndim != 3 or cross.shape[0] != m + 1 or cross.shape[1] != d:
            raise ValueError(f"cross must be (m + 1, d, r), got shape {cross.shape}")
        r = cross.shape[2]
        if gamma_rr.shape != (r, r):
            raise ValueError(f"gamma_rr must be ({r}, {r}), got {gamma_rr.shape}")
    size = m * d + r
    big = np.empty((size, size))
    rhs = np.empty((d, size))
    for i in range(m):
        for j in range(m):
            big[i * d : (i + 1) * d, j * d : (j + 1) * d] = acvf.gamma(j - i)
        rhs[:, i * d : (i + 1) * d] = acvf.gamma(i + 1)
    if r > 0:
        for i in range(m):
            big[i * d : (i + 1) * d, m * d :] = cross[i + 1]
            big[m * d :, i * d : (i + 1) * d] = cross[i + 1].T
        big[m * d :, m * d :] = gamma_rr
        rhs[:, m * d :] = cross[0]
    sing = np.linalg.svd(big, compute_uv=False)
    if sing[0] <= 0.0 or sing[-1] < PIVOT_RTOL * sing[0]:
        raise IllConditionedError(
            "stacked covariance matrix is numerically singular; reduce m or drop covariates"
        )
    coef = np.linalg.solve(big, rhs.T).T
    phis = [coef[:, i * d : (i + 1) * d] for i in range(m)]
    theta = coef[:, m * d :] if r > 0 else None
    return phis, theta


@dataclass(frozen=True)
class InnovationsState:
    """Output of the innovations recursion run to horizon m.

    thetas[k - 1][j - 1] holds Theta_{k, j}; v holds the one-step error
    covariances V_0..V_m.  The mean is the centering used by the
    autocovariances the recursion was built from.
    """

    thetas: tuple
    v: tuple
    mean: np.ndarray

    @property
    def m(self) -> int:
        return len(self.thetas)

    @property
    def last_row(self) -> tuple:
        return self.thetas[-1] if self.thetas else ()

    def predict_one_step(self, history) -> np.ndarray:
        """One-step prediction from the last m rows of history."""
        hist = np.atleast_2d(np.asarray(history, dtype=float))
        m = self.m
        if hist.shape[0] < m:
            raise InsufficientDataError(f"need at least m={m} history rows, got {hist.shape[0]}")
        x = hist[-m:] - self.mean
        d = x.shape[1]
        preds = [np.zeros(d)]
        for t in range(1, m + 1):
            step = np.zeros(d)
            for j in range(1, t + 1):
                step = step + self.thetas[t - 1][j - 1] @ (x[t - j] - preds[t - j])
            preds.append(step)
        return preds[m] + self.mean


def innovations(acvf: AcvfSequence, m: int) -> InnovationsState:
    """Innovations recursion for one-step prediction from m observations.

    Theta_{k, k-j} = (Gamma(k - j) - sum_i Theta_{k, k-i} V_i Theta_{j, j-i}^T) V_j^{-1}
    computed row by row with V_0 = Gamma(0) and
    V_k = Gamma(0) - sum_j Theta_{k, k-j} V_j Theta_{k, k-j}^T.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if acvf.max_lag < m:
        raise ValueError(f"need autocovariances up to lag {m}, have {acvf.max_lag}")
    d = acvf.d
    v = [acvf.gamma(0)]
    rows = []
    for k in range(1, m + 1):
        row = [None] * k
        for j in range(k):
            acc = acvf.gamma(k - j).copy()
            for i in range(j):
                acc -= row[k - i - 1] @ v[i] @ rows[j - 1][j - i - 1].T
            sing = np.linalg.svd(v[j], compute_uv=False)
            if sing[0] <= 0.0 or sing[-1] < PIVOT_RTOL * sing[0]:
                raise NumericalDegeneracyError(
                    f"innovation covariance V_{j} is numerically singular", step=j
                )
            # row index k - j in one-based notation is slot k - j - 1
            row[k - j - 1] = np.linalg.solve(v[j].T, acc.T).T
        vk = acvf.gamma(0).copy()
        for j in range(k):
            vk -= row[k - j - 1] @ v[j] @ row[k - j - 1].T
        rows.append(tuple(_readonly(b) for b in row))
        v.append(vk)
    return InnovationsState(
        thetas=tuple(rows), v=tuple(_readonly(x) for x in v), mean=acvf.mean
    )
