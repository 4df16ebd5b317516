"""Bridge from the latent-factor SPC model to the inverse-regression form.

The supervised-principal-components data model links response and
predictors through one latent variable U:

    Y   = beta0 + beta1 U + eps,
    X_j = alpha0_j + alpha1_j U + eps_j,

with eps, eps_j independent, mean zero.  Conditioning on Y = y gives

    X_j | (Y = y) = (alpha0_j - beta0 alpha1_j / beta1)
                    + (alpha1_j / beta1) y
                    + (eps_j - (alpha1_j / beta1) eps),

an inverse-regression model X_y = mu + Gamma f_y + eps* with
gamma_j = alpha1_j / beta1, c = ||gamma||, Gamma = gamma / c, and
f_y = c (y - ybar).  ``latent_to_pfc`` performs that construction,
including the error-structure pieces Omega / Omega0 written against an
orthogonal completion of Gamma; the ``verify_*`` operations check the
algebra numerically.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_vector
from .exceptions import DegenerateLoadingError, NumericalError, ValidationError
from .subspace import ReductionBasis

_BLOCK_TOL = 1e-10


@dataclass(frozen=True)
class LatentSpcModel:
    """Parameters of the one-factor latent model."""

    beta0: float
    beta1: float
    alpha0: np.ndarray
    alpha1: np.ndarray
    var_eps: float
    var_epsx: np.ndarray  # diagonal of the predictor-noise covariance

    def __post_init__(self):
        if self.beta1 == 0.0:
            raise ValidationError("beta1 must be nonzero")
        alpha0 = as_vector(self.alpha0, name="alpha0")
        alpha1 = as_vector(self.alpha1, name="alpha1")
        if alpha0.shape != alpha1.shape:
            raise ValidationError("alpha0 and alpha1 must have equal length")
        if self.var_eps < 0.0:
            raise ValidationError("var_eps must be nonnegative")
        var_epsx = as_vector(self.var_epsx, name="var_epsx")
        if var_epsx.shape != alpha0.shape:
            raise ValidationError("var_epsx must have one entry per predictor")
        if np.any(var_epsx < 0.0):
            raise ValidationError("var_epsx entries must be nonnegative")
        object.__setattr__(self, "alpha0", alpha0)
        object.__setattr__(self, "alpha1", alpha1)
        object.__setattr__(self, "var_epsx", var_epsx)

    @property
    def p(self):
        return self.alpha0.size

    def conditional_mean(self, y):
        """E[X | Y = y] from the latent model directly."""
        gamma = self.alpha1 / self.beta1
        return (self.alpha0 - self.beta0 * gamma) + gamma * y


@dataclass(frozen=True)
class PfcForm:
    """The inverse-regression form produced by :func:`latent_to_pfc`."""

    mu: np.ndarray
    basis: ReductionBasis  # p x 1
    c: float
    ybar: float
    var_eps_star: np.ndarray  # p x p
    G0: np.ndarray  # p x (p - 1) orthogonal completion
    Omega0: np.ndarray  # (p - 1) x (p - 1) symmetric psd square root
    Omega: float

    def mean_at(self, y):
        """mu + Gamma f_y with f_y = c (y - ybar)."""
        return self.mu + self.basis.G[:, 0] * (self.c * (y - self.ybar))


def householder_completion(g):
    """Columns 2..p of the Householder reflection mapping e1 to g.

    Deterministic orthogonal completion of a unit vector g: the returned
    p x (p-1) matrix has orthonormal columns all orthogonal to g.
    """
    g = np.asarray(g, dtype=np.float64)
    p = g.size
    if g[0] > 1.0 - 1e-12:
        return np.eye(p)[:, 1:]
    v = g.copy()
    v[0] -= 1.0
    H = np.eye(p) - 2.0 * np.outer(v, v) / (v @ v)
    return H[:, 1:]


def _sym_sqrt(S):
    S = (S + S.T) / 2.0
    w, V = np.linalg.eigh(S)
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.T


def latent_to_pfc(model, ybar):
    """Construct the inverse-regression form of a latent SPC model.

    gamma_j = alpha1_j / beta1; c = ||gamma||; Gamma = gamma / c;
    mu_j = (alpha0_j - beta0 alpha1_j / beta1) + gamma_j ybar;
    var(eps*) = diag(var_epsx) + var_eps gamma gamma';
    Omega0 = (Gamma0' Sigma_epsx Gamma0)^(1/2);
    Omega  = (Gamma' Sigma_epsx Gamma + c^2 var_eps)^(1/2).
    """
    if not isinstance(model, LatentSpcModel):
        raise ValidationError("model must be a LatentSpcModel")
    gamma = model.alpha1 / model.beta1
    c = float(np.linalg.norm(gamma))
    if c == 0.0:
        raise DegenerateLoadingError("all latent loadings alpha1 are zero")
    G = (gamma / c)[:, None]
    mu = (model.alpha0 - model.beta0 * gamma) + gamma * ybar
    var_eps_star = np.diag(model.var_epsx) + model.var_eps * np.outer(gamma, gamma)
    G0 = householder_completion(G[:, 0])
    sigma = model.var_epsx
    Omega0 = _sym_sqrt(G0.T @ (sigma[:, None] * G0))
    omega_sq = float(G[:, 0] @ (sigma * G[:, 0]) + c**2 * model.var_eps)
    return PfcForm(
        mu=mu,
        basis=ReductionBasis(G),
        c=c,
        ybar=float(ybar),
        var_eps_star=var_eps_star,
        G0=G0,
        Omega0=Omega0,
        Omega=float(np.sqrt(omega_sq)),
    )


@dataclass(frozen=True)
class MeanStructureReport:
    max_deviation: float
    deviations: tuple  # per grid point


def verify_mean_structure(model, form, y_grid):
    """Check mu + Gamma f_y against the latent model's conditional mean.

    The form must have been built with ybar equal to the grid mean.
    Returns the deviations; this is an exact algebraic identity, so the
    maximum should sit at rounding level.
    """
    y_grid = as_vector(y_grid, name="y_grid")
    deviations = []
    for y in y_grid:
        dev = np.abs(form.mean_at(y) - model.conditional_mean(y)).max()
        deviations.append(float(dev))
    return MeanStructureReport(
        max_deviation=float(max(deviations)),
        deviations=tuple(deviations),
    )


@dataclass(frozen=True)
class CovarianceBlocksReport:
    omega_deviation: float
    omega0_deviation: float
    cross_block_norm: float


def verify_covariance_blocks(model, form):
    """Check the error-covariance block identities of the reformulation.

    Gamma' var(eps*) Gamma must equal Omega^2 and Gamma0' var(eps*) Gamma0
    must equal Omega0^2 (both asserted to 1e-10).  The cross block
    Gamma0' var(eps*) Gamma is reported WITHOUT being asserted zero: for a
    non-isotropic diagonal predictor-noise covariance it generally is not.
    """
    G = form.basis.G[:, 0]
    V = form.var_eps_star
    omega_dev = abs(float(G @ V @ G) - form.Omega**2)
    omega0_dev = float(np.abs(form.G0.T @ V @ form.G0
                              - form.Omega0 @ form.Omega0).max())
    cross = form.G0.T @ V @ G
    report = CovarianceBlocksReport(
        omega_deviation=omega_dev,
        omega0_deviation=omega0_dev,
        cross_block_norm=float(np.linalg.norm(cross)),
    )
    if omega_dev > _BLOCK_TOL or omega0_dev > _BLOCK_TOL:
        raise NumericalError(
            f"covariance block identities violated: {report}", trace=report
        )
    return report
