"""Univariate predictor screening, forward and inverse.

Inverse screening fits each predictor on the centered response basis
(ordinary least squares with intercept) and tests the joint null that all
slope coefficients are zero with an F statistic.  Forward screening fits the
response on each predictor and uses the two-sided t test on the slope.
Either direction can instead threshold the coefficient magnitude
(standardized slope for the forward screen, sup-norm of the slope vector for
the inverse screen).

Degenerate (constant) predictors are dropped with a recorded warning, never
fatally.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import as_matrix, as_vector, check_consistent_rows
from .basis import BasisSpec, FyMatrix, build_fy
from .data import Dataset
from .exceptions import EmptyReductionError, ValidationError

_MODES = ("forward", "inverse")
_CRITERIA = ("p_value", "coefficient")


@dataclass(frozen=True)
class ScreeningConfig:
    """Which direction to screen in and which keep/drop rule to apply."""

    mode: str = "inverse"
    criterion: str = "p_value"
    alpha: float = 0.05
    theta: float = None

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValidationError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.criterion not in _CRITERIA:
            raise ValidationError(
                f"criterion must be one of {_CRITERIA}, got {self.criterion!r}"
            )
        if self.criterion == "p_value":
            if not 0.0 < self.alpha < 1.0:
                raise ValidationError("alpha must lie in (0, 1)")
        else:
            if self.theta is None or not self.theta > 0.0:
                raise ValidationError("theta must be positive")

    def passes(self, record):
        """Re-evaluate the keep criterion on a per-predictor record."""
        if self.criterion == "p_value":
            return bool(record.p_value < self.alpha)
        return bool(record.coefficient > self.theta)


@dataclass(frozen=True)
class PredictorRecord:
    """Screening evidence for one predictor column.

    ``coefficient`` is on the criterion scale: |slope / se| for the forward
    screen, max |slope| for the inverse screen.  ``raw_slope`` keeps the
    unstandardized slope(s).
    """

    index: int
    statistic: float
    p_value: float
    coefficient: float
    raw_slope: tuple
    kept: bool
    note: str = None


@dataclass(frozen=True)
class ScreeningResult:
    kept: tuple
    records: tuple
    config: ScreeningConfig
    warnings: tuple = field(default=())

    @property
    def n_kept(self):
        return len(self.kept)


def _finalize(stats_per_col, config):
    records = []
    warnings = []
    kept = []
    for rec in stats_per_col:
        keep = rec.note is None and config.passes(rec)
        rec = PredictorRecord(
            index=rec.index,
            statistic=rec.statistic,
            p_value=rec.p_value,
            coefficient=rec.coefficient,
            raw_slope=rec.raw_slope,
            kept=keep,
            note=rec.note,
        )
        records.append(rec)
        if rec.note is not None:
            warnings.append((rec.index, rec.note))
        if keep:
            kept.append(rec.index)
    return ScreeningResult(
        kept=tuple(sorted(kept)),
        records=tuple(records),
        config=config,
        warnings=tuple(warnings),
    )


def inverse_screen(X, fy, config=None):
    """Screen predictors by the univariate inverse regressions X_j on f_y.

    For each column, fits OLS of X_j on the basis matrix with intercept and
    computes the F statistic for the joint null that all r slopes vanish
    (df = (r, n - r - 1)).
    """
    if config is None:
        config = ScreeningConfig(mode="inverse")
    if config.mode != "inverse":
        raise ValidationError("inverse_screen requires mode='inverse'")
    if not isinstance(fy, FyMatrix):
        raise ValidationError("fy must be an FyMatrix")
    X = as_matrix(X, name="X")
    F = fy.F
    n, p = X.shape
    r = fy.r
    if F.shape[0] != n:
        raise ValidationError("fy was not built from this dataset's response")
    if n <= r + 1:
        raise ValidationError(f"need n > r + 1 = {r + 1}, got n = {n}")

    # One joint least-squares solve covers all columns: F is shared.
    Xc = X - X.mean(axis=0)
    coef, _, _, _ = np.linalg.lstsq(F, Xc, rcond=None)
    fitted = F @ coef
    rss = np.sum((Xc - fitted) ** 2, axis=0)
    tss = np.sum(Xc**2, axis=0)
    df2 = n - r - 1

    rows = []
    for j in range(p):
        if tss[j] == 0.0:
            rows.append(
                PredictorRecord(j, math.nan, math.nan, math.nan, (), False,
                                note="constant predictor")
            )
            continue
        slopes = coef[:, j]
        if rss[j] <= tss[j] * 1e-14:
            fstat, pval = math.inf, 0.0
        else:
            fstat = ((tss[j] - rss[j]) / r) / (rss[j] / df2)
            pval = float(stats.f.sf(fstat, r, df2))
        rows.append(
            PredictorRecord(
                index=j,
                statistic=float(fstat),
                p_value=pval,
                coefficient=float(np.abs(slopes).max()),
                raw_slope=tuple(float(b) for b in slopes),
                kept=False,
            )
        )
    return _finalize(rows, config)


def forward_screen(X, y, config=None):
    """Screen predictors by the univariate forward regressions y on X_j.

    Keeps a predictor when the two-sided t test on its slope beats alpha, or
    when |slope / se| exceeds theta under the coefficient criterion.
    """
    if config is None:
        config = ScreeningConfig(mode="forward")
    if config.mode != "forward":
        raise ValidationError("forward_screen requires mode='forward'")
    X = as_matrix(X, name="X")
    y = as_vector(y, name="y")
    check_consistent_rows(X, y)
    n, p = X.shape
    if n <= 2:
        raise ValidationError(f"need n > 2, got n = {n}")

    yc = y - y.mean()
    Xc = X - X.mean(axis=0)
    sxx = np.sum(Xc**2, axis=0)
    sxy = Xc.T @ yc
    tss = float(np.sum(yc**2))

    rows = []
    for j in range(p):
        if sxx[j] == 0.0:
            rows.append(
                PredictorRecord(j, math.nan, math.nan, math.nan, (), False,
                                note="constant predictor")
            )
            continue
        slope = sxy[j] / sxx[j]
        rss = tss - slope * sxy[j]
        rss = max(rss, 0.0)
        if rss <= tss * 1e-14:
            tstat, pval = math.inf, 0.0
        else:
            se = math.sqrt(rss / (n - 2) / sxx[j])
            tstat = slope / se
            pval = float(2.0 * stats.t.sf(abs(tstat), n - 2))
        rows.append(
            PredictorRecord(
                index=j,
                statistic=float(tstat),
                p_value=pval,
                coefficient=float(abs(tstat)),
                raw_slope=(float(slope),),
                kept=False,
            )
        )
    return _finalize(rows, config)


def reduce_columns(dataset, result):
    """Dataset restricted to the predictors a screening run kept."""
    if not isinstance(dataset, Dataset):
        raise ValidationError("reduce_columns expects a Dataset")
    if not result.kept:
        raise EmptyReductionError(
            "screening removed every predictor", records=result.records
        )
    return dataset.select_columns(list(result.kept))


class PredictorScreener(BaseEstimator, TransformerMixin):
    """Sklearn-style wrapper: fit screens predictors, transform drops them.

    Parameters mirror :class:`ScreeningConfig`; ``basis`` (a name or a
    :class:`BasisSpec`) is used only in inverse mode.
    """

    def __init__(self, mode="inverse", basis="linear", criterion="p_value",
                 alpha=0.05, theta=None):
        self.mode = mode
        self.basis = basis
        self.criterion = criterion
        self.alpha = alpha
        self.theta = theta

    def _config(self):
        return ScreeningConfig(
            mode=self.mode, criterion=self.criterion,
            alpha=self.alpha, theta=self.theta,
        )

    def fit(self, X, y):
        X = as_matrix(X, name="X")
        y = as_vector(y, name="y")
        config = self._config()
        if self.mode == "inverse":
            spec = (self.basis if isinstance(self.basis, BasisSpec)
                    else BasisSpec.from_name(self.basis))
            self.result_ = inverse_screen(X, build_fy(y, spec), config)
        else:
            self.result_ = forward_screen(X, y, config)
        self.n_features_in_ = X.shape[1]
        support = np.zeros(X.shape[1], dtype=bool)
        support[list(self.result_.kept)] = True
        self.support_ = support
        return self

    def get_support(self):
        return self.support_

    def transform(self, X):
        X = as_matrix(X, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"X has {X.shape[1]} columns, expected {self.n_features_in_}"
            )
        if not self.support_.any():
            raise EmptyReductionError(
                "screening removed every predictor", records=self.result_.records
            )
        return X[:, self.support_]
