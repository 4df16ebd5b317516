"""First-order ascent over the Grassmann manifold of d-planes in R^p.

The iterate is a p x d matrix with orthonormal columns.  Each step projects
the Euclidean gradient onto the horizontal space, (I - G G') grad, moves
along its unit-norm direction, and retracts back to the manifold with the
Q-factor of a thin QR (first-order equivalent to the geodesic update and
much cheaper).  A backtracking line search keeps the objective strictly
non-decreasing; the trial step is warm-started from the previously accepted
one so well-scaled steps cost one or two evaluations.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .subspace import ReductionBasis, qr_orthonormalize

DEFAULT_MAX_ITERS = 500
DEFAULT_INITIAL_STEP = 1.0
MAX_BACKTRACKS = 25


@dataclass(frozen=True)
class GrassmannStep:
    """One row of the optimization trace."""

    iteration: int
    value: float
    grad_norm: float
    step: float
    orth_residual: float
    tangency_residual: float


def grassmann_maximize(objective, G0, max_iters=DEFAULT_MAX_ITERS, tol=None,
                       initial_step=DEFAULT_INITIAL_STEP, value_fn=None):
    """Maximize a smooth function of a subspace basis.

    Parameters
    ----------
    objective : callable G -> (value, euclidean_gradient)
        The gradient has shape p x d.
    G0 : ReductionBasis or orthonormal ndarray, the starting point.
    max_iters : iteration cap, default 500.
    tol : stop when the Riemannian gradient norm falls below it; default
        1e-7 * (1 + |value|).
    initial_step : upper bound for the warm-started trial step, measured
        along the unit-norm ascent direction.
    value_fn : optional callable G -> value used for line-search trials
        (lets callers skip the gradient there); defaults to objective.

    Returns
    -------
    (ReductionBasis, list[GrassmannStep])
        The final iterate and the per-iteration trace.  Objective values
        along the trace are non-decreasing; the recorded step is the
        accepted distance along the unit ascent direction (0 when the
        iteration stopped).

    Raises
    ------
    NumericalError
        On a non-finite objective value or gradient (trace attached).
    """
    G = G0.G.copy() if isinstance(G0, ReductionBasis) else \
        np.array(G0, dtype=np.float64)
    if value_fn is None:
        value_fn = lambda M: objective(M)[0]  # noqa: E731
    trace = []

    value, egrad = objective(G)
    _check_finite(value, egrad, trace)
    warm_step = initial_step
    for iteration in range(max_iters):
        rgrad = egrad - G @ (G.T @ egrad)
        grad_norm = float(np.linalg.norm(rgrad))
        orth_res = float(np.abs(G.T @ G - np.eye(G.shape[1])).max())
        tan_res = float(np.abs(G.T @ rgrad).max())
        threshold = tol if tol is not None else 1e-7 * (1.0 + abs(value))

        accepted = False
        step = 0.0
        if grad_norm >= threshold:
            direction = rgrad / grad_norm
            step = min(initial_step, 4.0 * warm_step)
            for _ in range(MAX_BACKTRACKS + 1):
                G_try = qr_orthonormalize(G + step * direction)
                value_try = value_fn(G_try)
                if not np.isfinite(value_try):
                    raise NumericalError(
                        "objective became non-finite during line search",
                        trace=trace,
                    )
                if value_try > value:
                    accepted = True
                    break
                step *= 0.5

        trace.append(GrassmannStep(
            iteration=iteration,
            value=float(value),
            grad_norm=grad_norm,
            step=step if accepted else 0.0,
            orth_residual=orth_res,
            tangency_residual=tan_res,
        ))
        if not accepted:
            break
        warm_step = step
        G = G_try
        value, egrad = objective(G)
        _check_finite(value, egrad, trace)
    else:
        # iteration cap reached after an accepted move: record the endpoint
        rgrad = egrad - G @ (G.T @ egrad)
        trace.append(GrassmannStep(
            iteration=max_iters,
            value=float(value),
            grad_norm=float(np.linalg.norm(rgrad)),
            step=0.0,
            orth_residual=float(np.abs(G.T @ G - np.eye(G.shape[1])).max()),
            tangency_residual=float(np.abs(G.T @ rgrad).max()),
        ))

    return ReductionBasis(G), trace


def _check_finite(value, grad, trace):
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NumericalError(
            "objective or gradient became non-finite", trace=trace
        )
