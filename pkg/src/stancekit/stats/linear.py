"""Correlation screening, VIF pruning, OLS and correlation matrices."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg
from scipy.special import betainc
from sklearn.base import BaseEstimator, TransformerMixin

logger = logging.getLogger(__name__)


class RankDeficiencyError(ValueError):
    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"design matrix is rank deficient; dependent columns: {self.columns}")


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d vectors of equal length")
    if x.size < 2:
        raise ValueError("need at least two observations")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("pearson undefined for a constant vector")
    return float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))


def correlation_matrix(frame: pd.DataFrame) -> pd.DataFrame:
    """Pairwise Pearson correlations of a complete numeric frame; unit diagonal."""
    x = frame.to_numpy(dtype=np.float64)
    if np.isnan(x).any():
        raise ValueError("correlation_matrix needs a complete matrix")
    z = x - x.mean(axis=0)
    norms = np.sqrt((z * z).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        z = z / norms
    c = np.clip(z.T @ z, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return pd.DataFrame(c, index=frame.columns, columns=frame.columns)


def f_sf(f: float, d1: int, d2: int) -> float:
    """Upper tail of the F(d1, d2) distribution via the regularized incomplete beta function."""
    if math.isinf(f):
        return 0.0
    if f <= 0:
        return 1.0
    return float(betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)))


@dataclass
class OLSFit:
    coef: np.ndarray
    intercept: float
    r2: float
    f_stat: float
    f_pvalue: float
    n: int
    p: int
    std_err: np.ndarray = field(repr=False)
    intercept_std_err: float = field(repr=False, default=float("nan"))
    residuals: np.ndarray = field(repr=False, default=None)
    columns: list[str] | None = None

    @property
    def adj_r2(self) -> float:
        return 1 - (1 - self.r2) * (self.n - 1) / (self.n - self.p - 1)

    def coefficients(self) -> dict[str, float]:
        names = self.columns or [f"x{i}" for i in range(self.p)]
        return dict(zip(names, self.coef.tolist()))


def _pivoted_rank(a: np.ndarray, rtol: float = 1e-10):
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    d = np.abs(np.diag(r))
    rank = int((d > rtol * d.max()).sum()) if d.size and d.max() > 0 else 0
    return rank, piv


def ols(X, y, columns=None) -> OLSFit:
    """Least squares with intercept via QR.

    Raises :class:`RankDeficiencyError` naming dependent columns, and
    ValueError unless ``n > p + 1``.
    """
    if isinstance(X, pd.DataFrame):
        columns = list(X.columns) if columns is None else columns
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if n <= p + 1:
        raise ValueError(f"need n > p + 1 (n={n}, p={p})")
    A = np.column_stack([np.ones(n), X])
    rank, piv = _pivoted_rank(A)
    if rank < p + 1:
        names = columns or [f"x{i}" for i in range(p)]
        dep = sorted(names[j - 1] if j > 0 else "(intercept)" for j in piv[rank:])
        raise RankDeficiencyError(dep)
    q, r = np.linalg.qr(A)
    beta = scipy.linalg.solve_triangular(r, q.T @ y)
    resid = y - A @ beta
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    r2 = min(max(r2, 0.0), 1.0)
    dof = n - p - 1
    if r2 >= 1.0:
        f_stat = math.inf
    else:
        f_stat = (r2 / p) / ((1 - r2) / dof) if p > 0 else 0.0
    rinv = scipy.linalg.solve_triangular(r, np.eye(p + 1))
    se = np.sqrt(np.maximum(rss / dof * (rinv**2).sum(axis=1), 0.0))
    return OLSFit(
        coef=beta[1:],
        intercept=float(beta[0]),
        r2=r2,
        f_stat=f_stat,
        f_pvalue=f_sf(f_stat, p, dof) if p > 0 else 1.0,
        n=n,
        p=p,
        std_err=se[1:],
        intercept_std_err=float(se[0]),
        residuals=resid,
        columns=list(columns) if columns is not None else None,
    )


def _aux_r2(target: np.ndarray, others: np.ndarray) -> float:
    n = len(target)
    A = np.column_stack([np.ones(n), others])
    coef, *_ = np.linalg.lstsq(A, target, rcond=None)
    resid = target - A @ coef
    tss = float(((target - target.mean()) ** 2).sum())
    if tss == 0:
        return 1.0
    return 1.0 - float(resid @ resid) / tss


def vif(frame: pd.DataFrame, collinear_tol: float = 1e-10) -> pd.Series:
    """Variance inflation factor of each column from its auxiliary regression on the others.

    An auxiliary R^2 within ``collinear_tol`` of 1 counts as perfect collinearity (infinite VIF).
    """
    cols = sorted(frame.columns)
    x = frame[cols].to_numpy(dtype=np.float64)
    out = {}
    for j, c in enumerate(cols):
        if len(cols) == 1:
            out[c] = 1.0
            continue
        r2 = _aux_r2(x[:, j], np.delete(x, j, axis=1))
        out[c] = math.inf if r2 >= 1 - collinear_tol else 1.0 / (1.0 - r2)
    return pd.Series(out)[list(frame.columns)]


class VIFPruner(TransformerMixin, BaseEstimator):
    """Repeatedly drop the highest-VIF column until every VIF is below ``max_vif``.

    Ties are resolved alphabetically; ``removed_`` records ``(column, vif)`` in removal order.
    """

    def __init__(self, max_vif=6.0):
        self.max_vif = max_vif

    def fit(self, X: pd.DataFrame, y=None):
        X = pd.DataFrame(X)
        if X.shape[1] < 2:
            raise ValueError("VIF pruning needs at least two columns")
        keep = sorted(X.columns)
        self.removed_ = []
        while len(keep) > 1:
            v = vif(X[keep])
            top = v.max()
            if top < self.max_vif:
                break
            worst = min(c for c in keep if v[c] == top)
            self.removed_.append((worst, float(top)))
            keep.remove(worst)
        self.vif_ = vif(X[keep]) if len(keep) > 1 else pd.Series({keep[0]: 1.0})
        self.selected_ = [c for c in X.columns if c in keep]
        return self

    def transform(self, X):
        return pd.DataFrame(X)[self.selected_]


def vif_prune(frame: pd.DataFrame, max_vif: float = 6.0) -> list[str]:
    return VIFPruner(max_vif).fit(frame).selected_


class CorrelationSelector(TransformerMixin, BaseEstimator):
    """Keep columns whose absolute Pearson correlation with the target is at least ``min_abs``.

    Constant columns are dropped.  Missing cells are excluded pairwise.
    ``log_`` lists ``(column, r, reason)`` for every input column.
    """

    def __init__(self, min_abs=0.3):
        self.min_abs = min_abs

    def fit(self, X: pd.DataFrame, y):
        X = pd.DataFrame(X)
        y = np.asarray(y, dtype=np.float64)
        if np.isnan(y).any():
            raise ValueError("target must be complete")
        self.correlations_, self.log_, self.selected_ = {}, [], []
        for c in X.columns:
            col = X[c].to_numpy(dtype=np.float64)
            ok = ~np.isnan(col)
            try:
                r = pearson(col[ok], y[ok])
            except ValueError:
                self.log_.append((c, float("nan"), "constant"))
                continue
            self.correlations_[c] = r
            if abs(r) >= self.min_abs:
                self.selected_.append(c)
                self.log_.append((c, r, "kept"))
            else:
                self.log_.append((c, r, "below_threshold"))
        return self

    def transform(self, X):
        return pd.DataFrame(X)[self.selected_]


def select_by_correlation(frame: pd.DataFrame, target, min_abs: float = 0.3) -> list[str]:
    return CorrelationSelector(min_abs).fit(frame, target).selected_
