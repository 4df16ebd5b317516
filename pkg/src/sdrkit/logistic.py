"""Safeguarded maximum-likelihood logistic regression with offsets.

Newton-Raphson with step halving: each step is halved until the
log-likelihood does not decrease (at most 30 halvings), so the likelihood
trace is monotone.  The linear predictor is clamped to [-30, 30] inside the
probability and likelihood evaluations; beyond that range probabilities are
within 1e-13 of 0/1 and the likelihood is flat.

Separation is never fatal.  The clamp boundary defines the numerically
stable region: beyond it probabilities are 0/1 to machine precision, the
Hessian collapses, and iterates wander on a flat plateau.  A fit whose
proposed iterate saturates the clamp, or whose coefficient sup-norm exceeds
1e3, stops and is capped at the last stable iterate (``capped``); a fit
already saturated at its solution is likewise flagged.  Either way
``separation_detected`` is set and the fit still returns.

``fit_logistic`` handles one fit with a general design; ``fit_logistic_batch``
runs many through-origin fits sharing one design matrix in lockstep (the
same algorithm applied rowwise), which is what the alternating binary-PFC
steps need n and p at a time.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._validation import as_matrix
from .exceptions import CollinearityError, EmptyDataError, ValidationError

ETA_CLAMP = 30.0
COEF_CAP = 1e3
MAX_HALVINGS = 30
_LL_TOL = 1e-10
_GRAD_TOL = 1e-10
_GRAD_CONVERGED = 1e-8


@dataclass(frozen=True)
class LogisticFit:
    """Result of one logistic maximization."""

    coefficients: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    separation_detected: bool
    capped: bool
    loglik_trace: tuple


def _loglik(y, eta_clipped):
    return float(np.dot(y, eta_clipped) - np.logaddexp(0.0, eta_clipped).sum())


def fit_logistic(y01, Z, offset=None, intercept=False, start=None, max_iter=100):
    """Maximize the Bernoulli log-likelihood with linear predictor
    offset + [intercept +] Z b.

    Parameters
    ----------
    y01 : (m,) array of 0/1 responses.
    Z : (m, k) design matrix, full column rank (k = 0 allowed).
    offset : (m,) fixed additive term, default zeros.
    intercept : prepend a column of ones when True.
    start : optional warm-start coefficients, default zeros.
    """
    y = np.asarray(y01, dtype=np.float64)
    if y.ndim != 1:
        raise ValidationError("y01 must be a 1-D vector")
    m = y.size
    if m == 0:
        raise EmptyDataError("no observations")
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ValidationError("y01 must contain only 0/1 entries")
    if Z is None:
        Z = np.empty((m, 0))
    Z = as_matrix(Z, name="Z")
    if Z.shape[0] != m:
        raise ValidationError("Z and y01 have different numbers of rows")
    design = np.column_stack([np.ones(m), Z]) if intercept else Z
    k = design.shape[1]
    if k > 0 and np.linalg.matrix_rank(design) < k:
        raise CollinearityError("design matrix is rank deficient")
    offset = np.zeros(m) if offset is None else np.asarray(offset, dtype=np.float64)
    if offset.shape != (m,):
        raise ValidationError("offset must have one entry per observation")

    b = np.zeros(k) if start is None else np.array(start, dtype=np.float64)
    if b.shape != (k,):
        raise ValidationError(f"start must have shape ({k},)")

    eta = offset + design @ b
    etac = np.clip(eta, -ETA_CLAMP, ETA_CLAMP)
    ll = _loglik(y, etac)
    trace = [ll]
    separated = capped = False
    iterations = 0

    for _ in range(max_iter):
        P = expit(etac)
        grad = design.T @ (y - P)
        if k == 0 or np.linalg.norm(grad) < _GRAD_TOL:
            break
        iterations += 1
        W = P * (1.0 - P)
        H = design.T @ (W[:, None] * design)
        try:
            delta = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(H, grad, rcond=None)[0]

        step = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            b_try = b + step * delta
            eta_try = offset + design @ b_try
            etac_try = np.clip(eta_try, -ETA_CLAMP, ETA_CLAMP)
            ll_try = _loglik(y, etac_try)
            if ll_try >= ll:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        if np.abs(b_try).max() > COEF_CAP or np.abs(eta_try).max() >= ETA_CLAMP:
            # runaway fit: keep the last stable iterate
            separated = capped = True
            break
        improvement = ll_try - ll
        b, eta, etac, ll = b_try, eta_try, etac_try, ll_try
        trace.append(ll)
        if improvement < _LL_TOL * (1.0 + abs(ll)):
            break

    P = expit(etac)
    grad_norm = np.linalg.norm(design.T @ (y - P)) if k else 0.0
    if np.abs(eta).max(initial=0.0) >= ETA_CLAMP:
        separated = True
    converged = (not separated) and grad_norm < _GRAD_CONVERGED * (1.0 + abs(ll))
    return LogisticFit(
        coefficients=b,
        loglik=ll,
        iterations=iterations,
        converged=converged,
        separation_detected=separated,
        capped=capped,
        loglik_trace=tuple(trace),
    )


@dataclass(frozen=True)
class BatchLogisticResult:
    """Per-row results of many lockstep through-origin fits."""

    coefficients: np.ndarray  # (B, d)
    loglik: np.ndarray  # (B,)
    iterations: np.ndarray  # (B,)
    converged: np.ndarray  # (B,) bool
    separation_detected: np.ndarray  # (B,) bool
    capped: np.ndarray  # (B,) bool


def fit_logistic_batch(Y, Z, offset=None, start=None, max_iter=100):
    """Run B independent through-origin logistic fits sharing one design.

    Row b of ``Y`` (shape (B, m)) is the 0/1 response of fit b; ``Z`` (m, d)
    is the common design; ``offset`` broadcasts over rows ((m,) or (B, m)).
    Each row follows exactly the scalar algorithm of :func:`fit_logistic`
    (Newton, per-row step halving, clamping, both separation detectors);
    rows are independent and the result does not depend on batch order.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise ValidationError("Y must be 2-D (one fit per row)")
    B, m = Y.shape
    if m == 0:
        raise EmptyDataError("no observations")
    if not np.all((Y == 0.0) | (Y == 1.0)):
        raise ValidationError("Y must contain only 0/1 entries")
    Z = as_matrix(Z, name="Z")
    if Z.shape[0] != m:
        raise ValidationError("Z rows must match observations per fit")
    d = Z.shape[1]
    if d == 0 or np.linalg.matrix_rank(Z) < d:
        raise CollinearityError("design matrix is rank deficient")
    if offset is None:
        offset = np.zeros((1, m))
    else:
        offset = np.asarray(offset, dtype=np.float64)
        if offset.ndim == 1:
            offset = offset[None, :]
        if offset.shape not in ((1, m), (B, m)):
            raise ValidationError("offset must broadcast to (B, m)")

    coef = np.zeros((B, d)) if start is None else np.array(start, dtype=np.float64)
    if coef.shape != (B, d):
        raise ValidationError(f"start must have shape ({B}, {d})")

    eta = offset + coef @ Z.T  # (B, m)
    etac = np.clip(eta, -ETA_CLAMP, ETA_CLAMP)
    ll = np.sum(Y * etac - np.logaddexp(0.0, etac), axis=1)
    iterations = np.zeros(B, dtype=int)
    separated = np.zeros(B, dtype=bool)
    capped = np.zeros(B, dtype=bool)
    active = np.ones(B, dtype=bool)

    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        eta_a = etac[idx]
        P = expit(eta_a)
        resid = Y[idx] - P
        grad = resid @ Z  # (a, d)
        grad_small = np.linalg.norm(grad, axis=1) < _GRAD_TOL
        if grad_small.any():
            active[idx[grad_small]] = False
            keep = ~grad_small
            idx = idx[keep]
            if idx.size == 0:
                continue
            P = P[keep]
            grad = grad[keep]
        W = P * (1.0 - P)
        H = np.einsum("am,md,me->ade", W, Z, Z, optimize=True)
        try:
            delta = np.linalg.solve(H, grad[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta = np.empty_like(grad)
            for i in range(idx.size):
                try:
                    delta[i] = np.linalg.solve(H[i], grad[i])
                except np.linalg.LinAlgError:
                    delta[i] = np.linalg.lstsq(H[i], grad[i], rcond=None)[0]
        iterations[idx] += 1

        # per-row step halving until the likelihood does not decrease
        step = np.ones(idx.size)
        pending = np.ones(idx.size, dtype=bool)
        new_coef = coef[idx].copy()
        new_ll = ll[idx].copy()
        if offset.shape[0] == B:
            off_rows = offset[idx]
        else:
            off_rows = np.broadcast_to(offset, (idx.size, m))
        for _ in range(MAX_HALVINGS + 1):
            rows = np.flatnonzero(pending)
            if rows.size == 0:
                break
            c_try = coef[idx[rows]] + step[rows, None] * delta[rows]
            e_try = off_rows[rows] + c_try @ Z.T
            ec_try = np.clip(e_try, -ETA_CLAMP, ETA_CLAMP)
            l_try = np.sum(Y[idx[rows]] * ec_try - np.logaddexp(0.0, ec_try), axis=1)
            ok = l_try >= ll[idx[rows]]
            if ok.any():
                acc = rows[ok]
                new_coef[acc] = c_try[ok]
                new_ll[acc] = l_try[ok]
                pending[acc] = False
            step[rows[~ok]] *= 0.5
        stalled = pending  # no non-decreasing step found

        eta_new = off_rows + new_coef @ Z.T
        over = (np.abs(new_coef).max(axis=1) > COEF_CAP) \
            | (np.abs(eta_new).max(axis=1) >= ETA_CLAMP)
        over &= ~stalled
        if over.any():
            # runaway fit: keep the previous (last stable) coefficients
            rows = idx[over]
            separated[rows] = True
            capped[rows] = True
            active[rows] = False

        move = ~stalled & ~over
        rows = idx[move]
        if rows.size:
            improvement = new_ll[move] - ll[rows]
            coef[rows] = new_coef[move]
            ll[rows] = new_ll[move]
            done = improvement < _LL_TOL * (1.0 + np.abs(ll[rows]))
            active[rows[done]] = False
        active[idx[stalled]] = False
        eta = offset + coef @ Z.T
        etac = np.clip(eta, -ETA_CLAMP, ETA_CLAMP)

    P = expit(etac)
    grad_norm = np.linalg.norm((Y - P) @ Z, axis=1)
    saturated = np.abs(eta).max(axis=1) >= ETA_CLAMP
    separated |= saturated
    converged = ~separated & (grad_norm < _GRAD_CONVERGED * (1.0 + np.abs(ll)))
    return BatchLogisticResult(
        coefficients=coef,
        loglik=ll,
        iterations=iterations,
        converged=converged,
        separation_detected=separated,
        capped=capped,
    )
