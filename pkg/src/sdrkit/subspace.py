"""Orthonormal reduction bases and principal angles between subspaces."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix
from .exceptions import RankDeficiencyError, ValidationError

_ORTHO_TOL = 1e-10


def qr_orthonormalize(M, tol=None):
    """Q-factor of the thin QR of M with the diagonal of R made nonnegative.

    The sign convention makes the result deterministic and keeps
    ``qr_orthonormalize(Q) == Q`` for an already-orthonormal Q.
    """
    M = np.asarray(M, dtype=np.float64)
    Q, R = np.linalg.qr(M)
    diag = np.diag(R)
    if tol is not None:
        ok = np.abs(diag) > tol
        if not np.all(ok):
            raise RankDeficiencyError(
                f"matrix has column rank {int(ok.sum())} < {M.shape[1]}",
                achievable_rank=int(ok.sum()),
            )
    signs = np.where(diag < 0.0, -1.0, 1.0)
    return Q * signs


@dataclass(frozen=True)
class ReductionBasis:
    """A p x d matrix with orthonormal columns spanning a reduction subspace.

    The matrix is validated (and frozen) at construction; use
    :meth:`from_matrix` to orthonormalize a raw full-column-rank estimate.
    Columns are identified only up to rotation of their span, so comparisons
    should go through :func:`subspace_angle`.
    """

    G: np.ndarray

    def __post_init__(self):
        G = as_matrix(self.G, name="G")
        p, d = G.shape
        if not 1 <= d <= p:
            raise ValidationError(f"need 1 <= d <= p, got shape {G.shape}")
        dev = np.abs(G.T @ G - np.eye(d)).max()
        if dev > _ORTHO_TOL:
            raise ValidationError(
                f"columns are not orthonormal (max deviation {dev:.3g})"
            )
        G = G.copy()
        G.setflags(write=False)
        object.__setattr__(self, "G", G)

    @classmethod
    def from_matrix(cls, M):
        """Orthonormalize a full-column-rank p x d matrix via QR."""
        M = as_matrix(M, name="basis matrix")
        norms = np.linalg.norm(M, axis=0)
        if norms.max() == 0.0:
            raise RankDeficiencyError("basis matrix is zero", achievable_rank=0)
        return cls(qr_orthonormalize(M, tol=1e-12 * norms.max()))

    @property
    def p(self):
        return self.G.shape[0]

    @property
    def d(self):
        return self.G.shape[1]


def _as_orthonormal(A):
    if isinstance(A, ReductionBasis):
        return A.G
    M = np.asarray(A, dtype=np.float64)
    if M.ndim == 1:
        M = M[:, None]
    return ReductionBasis.from_matrix(M).G


def principal_angles(A, B, degrees=True):
    """All principal angles between span(A) and span(B), ascending.

    Cosines come from the singular values of A^T B (clamped to [0, 1]);
    angles below 45 degrees are recomputed from the sine-based residual
    decomposition, which stays accurate where arccos loses precision.
    Inputs may be ``ReductionBasis`` objects or matrices, which are
    orthonormalized first.
    """
    Ga, Gb = _as_orthonormal(A), _as_orthonormal(B)
    if Ga.shape[0] != Gb.shape[0]:
        raise ValidationError(
            f"ambient dimensions differ: {Ga.shape[0]} vs {Gb.shape[0]}"
        )
    if Ga.shape[1] != Gb.shape[1]:
        raise ValidationError(
            f"subspace dimensions differ: {Ga.shape[1]} vs {Gb.shape[1]}"
        )
    M = Ga.T @ Gb
    cosines = np.clip(np.linalg.svd(M, compute_uv=False), 0.0, 1.0)
    angles = np.arccos(cosines)  # ascending: cosines are descending
    small = cosines**2 >= 0.5
    if small.any():
        sines = np.linalg.svd(Gb - Ga @ M, compute_uv=False)[::-1]
        sines = np.clip(sines, 0.0, 1.0)
        sines[sines < 1e-14] = 0.0  # identical subspaces give exactly zero
        angles = np.where(small, np.arcsin(sines), angles)
    if degrees:
        angles = np.degrees(angles)
    return angles


def subspace_angle(A, B):
    """Largest principal angle between two equal-dimension subspaces, degrees.

    For d = 1 this is arccos|a . b|, the usual angle between two lines.
    """
    return float(principal_angles(A, B, degrees=True)[-1])
