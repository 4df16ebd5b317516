"""Principal fitted components for all-binary predictors.

Each predictor given the response is Bernoulli with natural parameter
mu_j + gamma_j' nu_y, predictors conditionally independent.  The total
log-likelihood

    sum_y sum_j [ log q_j(y) + x_jy (mu_j + gamma_j' nu_y) ],
    q_j(y) = 1 / (1 + exp(mu_j + gamma_j' nu_y)),

is maximized by alternating three exact coordinate blocks:

* nu-step: one through-origin logistic fit per observation (design = rows
  of Gamma, offsets = mu), n fits in total;
* mu-step: one intercept-only logistic fit per predictor (offsets =
  gamma_j' nu_y), p fits in total;
* Gamma-step: first-order ascent over the Grassmann manifold with Euclidean
  gradient R' N, R the residual matrix x_jy - p_j(y) and N the nu rows.

(mu, nu) are identified only up to the translation (mu_j + gamma_j' c,
nu_y - c), so nu columns are re-centered each cycle; the compensating shift
is folded into the mu-step's warm start, which makes the full cycle's
log-likelihood non-decreasing even when individual sub-fits separate and
get capped.  Instability is reported through warnings, never swallowed.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import as_matrix, as_vector, check_binary_matrix, \
    check_consistent_rows
from .basis import BasisSpec, build_fy
from .exceptions import NumericalError, ValidationError
from .grassmann import grassmann_maximize
from .logistic import ETA_CLAMP, fit_logistic_batch
from .pfc import fit_pfc, project
from .subspace import ReductionBasis

_ASCENT_SLACK = 1e-8


@dataclass(frozen=True)
class SubstepWarning:
    """A flagged sub-fit: which block, which observation/predictor, why."""

    step: str
    index: int
    reason: str


@dataclass(frozen=True)
class BinaryPfcState:
    """Fitted (mu, Gamma, nu) block with convergence diagnostics."""

    mu: np.ndarray
    basis: ReductionBasis
    nu: np.ndarray
    loglik: float
    loglik_trace: tuple
    outer_iterations: int
    converged: bool
    warnings: tuple


def _loglik(X, mu, G, nu):
    eta = np.clip(mu + nu @ G.T, -ETA_CLAMP, ETA_CLAMP)
    return float(np.sum(X * eta - np.logaddexp(0.0, eta)))


def bernoulli_loglik(X, mu, G, nu):
    """Log-likelihood of a binary matrix under the (mu, Gamma, nu) state.

    The linear predictor is clamped to +-30, as in the logistic engine.
    """
    X = check_binary_matrix(X)
    mu = as_vector(mu, name="mu")
    G = G.G if isinstance(G, ReductionBasis) else as_matrix(G, name="G")
    nu = as_matrix(nu, name="nu")
    n, p = X.shape
    if mu.shape != (p,) or G.shape[0] != p or nu.shape != (n, G.shape[1]):
        raise ValidationError("inconsistent shapes for (X, mu, G, nu)")
    return _loglik(X, mu, G, nu)


def loglik_gradients(X, mu, G, nu):
    """Analytic gradients of the log-likelihood w.r.t. mu, Gamma, nu.

    With R the n x p residual matrix x_jy - p_j(y):
    d/dmu = column sums of R; d/dGamma = R' N; d/dnu = R Gamma.
    """
    G = G.G if isinstance(G, ReductionBasis) else np.asarray(G, dtype=np.float64)
    eta = np.clip(mu + nu @ G.T, -ETA_CLAMP, ETA_CLAMP)
    R = X - expit(eta)
    return R.sum(axis=0), R.T @ nu, R @ G


def _batch_warnings(result, step):
    out = []
    for i in range(result.loglik.size):
        if result.separation_detected[i]:
            reason = "coefficients capped" if result.capped[i] \
                else "saturated fit (monotone likelihood)"
            out.append(SubstepWarning(step=step, index=i, reason=reason))
        elif not result.converged[i]:
            out.append(SubstepWarning(step=step, index=i,
                                      reason="did not converge"))
    return out


def _row_loglik(X, mu, G, nu):
    eta = np.clip(mu + nu @ G.T, -ETA_CLAMP, ETA_CLAMP)
    return np.sum(X * eta - np.logaddexp(0.0, eta), axis=1)


def nu_step(X, mu, G, prev=None):
    """Estimate every observation's nu_y given (mu, Gamma).

    Fits n through-origin logistic regressions (response = the observation's
    predictor values, design = Gamma rows, offset = mu), each started from
    zero.  When ``prev`` holds the previous cycle's estimates, each row
    keeps whichever of (fresh fit, previous value) has the higher
    likelihood: separated rows drift a bounded amount from a zero start,
    and the ratchet keeps the block update monotone.  The nu columns are
    then centered to mean zero; mu is fixed here, so the compensating shift
    is returned for the mu-step to absorb.

    Returns (nu, shift, warnings).
    """
    G = G.G if isinstance(G, ReductionBasis) else np.asarray(G, dtype=np.float64)
    result = fit_logistic_batch(X, G, offset=mu)
    nu = result.coefficients
    if prev is not None:
        keep_prev = _row_loglik(X, mu, G, prev) > _row_loglik(X, mu, G, nu)
        nu = np.where(keep_prev[:, None], prev, nu)
    shift = nu.mean(axis=0)
    nu = nu - shift
    return nu, shift, _batch_warnings(result, "nu")


def mu_step(X, G, nu, start=None):
    """Estimate every predictor's intercept mu_j given (Gamma, nu).

    Fits p intercept-only logistic regressions with offsets gamma_j' nu_y.
    Warm-starting at the previous mu plus the deferred nu-centering shift
    makes nu_step followed by mu_step jointly non-decreasing.

    Returns (mu, warnings).
    """
    G = G.G if isinstance(G, ReductionBasis) else np.asarray(G, dtype=np.float64)
    n = nu.shape[0]
    offsets = (nu @ G.T).T  # (p, n)
    ones = np.ones((n, 1))
    start_arr = None if start is None else np.asarray(start, dtype=np.float64)[:, None]
    result = fit_logistic_batch(X.T, ones, offset=offsets, start=start_arr)
    return result.coefficients[:, 0], _batch_warnings(result, "mu")


def gamma_step(X, mu, nu, G_current, max_iters=500, tol=None, initial_step=1.0):
    """Maximize the log-likelihood over Gamma with (mu, nu) fixed.

    Euclidean gradient R' N; ascent over the Grassmann manifold starting
    from the current basis.  Returns (ReductionBasis, trace).
    """
    def objective(G):
        eta = np.clip(mu + nu @ G.T, -ETA_CLAMP, ETA_CLAMP)
        value = float(np.sum(X * eta - np.logaddexp(0.0, eta)))
        grad = (X - expit(eta)).T @ nu
        return value, grad

    def value_fn(G):
        return _loglik(X, mu, G, nu)

    return grassmann_maximize(objective, G_current, max_iters=max_iters,
                              tol=tol, initial_step=initial_step,
                              value_fn=value_fn)


def _default_init(X, y, d, init_basis):
    if init_basis is None:
        init_basis = BasisSpec.linear() if d == 1 \
            else BasisSpec.custom(range(1, d + 1))
    basis = fit_pfc(X, build_fy(y, init_basis), d=d)
    G = basis.G
    nu = (X - X.mean(axis=0)) @ G
    means = X.mean(axis=0)
    with np.errstate(divide="ignore"):
        mu = np.log(means) - np.log1p(-means)
    mu = np.clip(mu, -4.0, 4.0)
    return mu, G, nu


def fit_binary_pfc(X, y=None, d=1, init_basis=None, init_state=None,
                   max_outer=200, tol=1e-6):
    """Alternating maximization of the binary-predictor PFC likelihood.

    Parameters
    ----------
    X : (n, p) matrix of 0/1 predictors.
    y : response vector, required unless an explicit ``init_state`` is given
        (the default initialization fits continuous PFC on X against y).
    d : target subspace dimension, 1 <= d < p.
    init_basis : BasisSpec for the initializing PFC fit; defaults to the
        centered linear basis for d = 1 and centered powers 1..d otherwise.
    init_state : optional explicit (mu, G, nu) start.
    max_outer : outer-cycle cap, default 200.
    tol : stop when the relative log-likelihood improvement of a full cycle
        falls below this, default 1e-6.

    Returns
    -------
    BinaryPfcState
        The outer-loop likelihood trace is non-decreasing (within 1e-8 per
        cycle); a violation raises ``NumericalError``.  All sub-step
        warnings are accumulated on the state.
    """
    X = check_binary_matrix(X)
    n, p = X.shape
    col_means = X.mean(axis=0)
    constant = np.flatnonzero((col_means == 0.0) | (col_means == 1.0))
    if constant.size:
        raise ValidationError(
            f"constant predictor columns cannot be fitted: {constant.tolist()}"
        )
    if not 1 <= d < p:
        raise ValidationError(f"need 1 <= d < p, got d={d}, p={p}")

    if init_state is not None:
        mu, G, nu = init_state
        mu = np.array(mu, dtype=np.float64)
        G = ReductionBasis.from_matrix(
            G.G if isinstance(G, ReductionBasis) else G).G
        nu = np.array(nu, dtype=np.float64)
        if mu.shape != (p,) or G.shape != (p, d) or nu.shape != (n, d):
            raise ValidationError("init_state has inconsistent shapes")
        # pin the translation normalization without changing the likelihood
        shift = nu.mean(axis=0)
        nu = nu - shift
        mu = mu + G @ shift
    else:
        if y is None:
            raise ValidationError("y is required unless init_state is given")
        y = as_vector(y, name="y")
        check_consistent_rows(X, y)
        mu, G, nu = _default_init(X, y, d, init_basis)

    ll = _loglik(X, mu, G, nu)
    trace = [ll]
    warnings = []
    converged = False
    cycles = 0

    for cycles in range(1, max_outer + 1):
        nu, shift, w_nu = nu_step(X, mu, G, prev=nu)
        warnings.extend(w_nu)
        mu, w_mu = mu_step(X, G, nu, start=mu + G @ shift)
        warnings.extend(w_mu)
        basis, _ = gamma_step(X, mu, nu, G)
        G = basis.G

        ll_new = _loglik(X, mu, G, nu)
        if ll_new < ll - _ASCENT_SLACK:
            raise NumericalError(
                f"log-likelihood decreased on cycle {cycles}: "
                f"{ll} -> {ll_new}", trace=trace,
            )
        improvement = ll_new - ll
        ll = ll_new
        trace.append(ll)
        if improvement < tol * (1.0 + abs(ll)):
            converged = True
            break

    return BinaryPfcState(
        mu=mu,
        basis=ReductionBasis(G),
        nu=nu,
        loglik=ll,
        loglik_trace=tuple(trace),
        outer_iterations=cycles,
        converged=converged,
        warnings=tuple(warnings),
    )


class BinaryPFC(BaseEstimator, TransformerMixin):
    """Sklearn-style wrapper around :func:`fit_binary_pfc`."""

    def __init__(self, n_components=1, init_basis=None, max_outer=200, tol=1e-6):
        self.n_components = n_components
        self.init_basis = init_basis
        self.max_outer = max_outer
        self.tol = tol

    def fit(self, X, y):
        state = fit_binary_pfc(
            X, y, d=self.n_components, init_basis=self.init_basis,
            max_outer=self.max_outer, tol=self.tol,
        )
        self.state_ = state
        self.basis_ = state.basis
        self.components_ = state.basis.G
        self.mu_ = state.mu
        self.nu_ = state.nu
        self.loglik_ = state.loglik
        self.converged_ = state.converged
        self.n_features_in_ = state.basis.p
        return self

    def transform(self, X):
        return project(X, self.basis_)
