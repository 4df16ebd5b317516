"""Continuous-predictor reduction estimators.

``fit_pfc`` implements the isotropic-error principal fitted components
estimator: regress the centered predictors on the centered response basis
and take the leading eigenvectors of the fitted-value covariance.
``fit_spc`` extracts leading principal components of the sample covariance
matrix (covariance, not correlation), the extraction step of supervised
principal components once screening has already reduced the columns.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import as_matrix, as_vector, check_consistent_rows
from .basis import BasisSpec, FyMatrix, build_fy
from .exceptions import CollinearityError, RankDeficiencyError, ValidationError
from .subspace import ReductionBasis

_RANK_RTOL = 1e-12


def eigh_descending(S):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Eigenvector signs are fixed so the largest-magnitude entry of each
    vector is positive, making outputs reproducible across runs.
    """
    w, V = np.linalg.eigh(S)
    w = w[::-1]
    V = V[:, ::-1]
    for k in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, k])))
        if V[i, k] < 0.0:
            V[:, k] = -V[:, k]
    return w, V


def _top_d(S, d, what):
    w, V = eigh_descending(S)
    scale = max(w[0], 0.0)
    rank = int(np.sum(w > scale * _RANK_RTOL)) if scale > 0.0 else 0
    if d > rank:
        raise RankDeficiencyError(
            f"requested d={d} directions but {what} has rank {rank}",
            achievable_rank=rank,
        )
    return ReductionBasis(V[:, :d]), w


def fitted_covariance(X, fy):
    """Covariance of the fitted values from regressing centered X on f_y."""
    X = as_matrix(X, name="X")
    if not isinstance(fy, FyMatrix):
        raise ValidationError("fy must be an FyMatrix")
    F = fy.F
    if F.shape[0] != X.shape[0]:
        raise ValidationError("fy was not built from this dataset's response")
    Xc = X - X.mean(axis=0)
    coef, _, rank, _ = np.linalg.lstsq(F, Xc, rcond=None)
    if rank < fy.r:
        raise CollinearityError("basis matrix F has collinear columns")
    fitted = F @ coef
    return fitted.T @ fitted / X.shape[0]


def fit_pfc(X, fy, d=1):
    """Principal fitted components basis: top-d eigenvectors of the
    fitted-value covariance.  Raises ``RankDeficiencyError`` when d exceeds
    the achievable rank (at most r)."""
    S = fitted_covariance(X, fy)
    basis, _ = _top_d(S, d, "fitted-value covariance")
    return basis


def fit_spc(X, d=1):
    """Top-d principal components of the sample covariance X_c' X_c / n."""
    X = as_matrix(X, name="X")
    Xc = X - X.mean(axis=0)
    S = Xc.T @ Xc / X.shape[0]
    basis, _ = _top_d(S, d, "sample covariance")
    return basis


def project(X, basis, y=None):
    """Reduced coordinates G'x_i for each row, optionally with y appended.

    The output is plot-ready for sufficient summary plots: columns are the
    d reduction coordinates followed by the response when given.
    """
    X = as_matrix(X, name="X")
    G = basis.G if isinstance(basis, ReductionBasis) else as_matrix(basis, "basis")
    if X.shape[1] != G.shape[0]:
        raise ValidationError(
            f"X has {X.shape[1]} columns but basis lives in dimension {G.shape[0]}"
        )
    coords = X @ G
    if y is None:
        return coords
    y = as_vector(y, name="y")
    check_consistent_rows(X, y)
    return np.column_stack([coords, y])


class PrincipalFittedComponents(BaseEstimator, TransformerMixin):
    """Inverse-regression reduction with a declarative response basis."""

    def __init__(self, n_components=1, basis="linear"):
        self.n_components = n_components
        self.basis = basis

    def fit(self, X, y):
        X = as_matrix(X, name="X")
        y = as_vector(y, name="y")
        check_consistent_rows(X, y)
        spec = (self.basis if isinstance(self.basis, BasisSpec)
                else BasisSpec.from_name(self.basis))
        fy = build_fy(y, spec)
        S = fitted_covariance(X, fy)
        basis, w = _top_d(S, self.n_components, "fitted-value covariance")
        self.basis_ = basis
        self.components_ = basis.G
        self.eigenvalues_ = w[: self.n_components]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        return project(X, self.basis_)


class LeadingPrincipalComponents(BaseEstimator, TransformerMixin):
    """Leading eigenvectors of the sample covariance matrix."""

    def __init__(self, n_components=1):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = as_matrix(X, name="X")
        Xc = X - X.mean(axis=0)
        S = Xc.T @ Xc / X.shape[0]
        basis, w = _top_d(S, self.n_components, "sample covariance")
        self.basis_ = basis
        self.components_ = basis.G
        self.eigenvalues_ = w[: self.n_components]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        return project(X, self.basis_)
