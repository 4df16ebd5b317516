"""Centered response bases.

The inverse-regression estimators regress predictors on known functions of
the response.  ``BasisSpec`` describes those functions declaratively (which
integer powers of y, plus an optional uniform multiplier) and ``build_fy``
materializes them as a centered n x r matrix.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_vector
from .exceptions import CollinearityError, DegenerateBasisError, ValidationError

_KINDS = ("linear", "quadratic", "custom")


@dataclass(frozen=True)
class BasisSpec:
    """Declarative description of a centered power basis of the response.

    Parameters
    ----------
    kind : {"linear", "quadratic", "custom"}
        "linear" is the single centered column y - mean(y); "quadratic"
        adds the centered square; "custom" uses ``powers`` explicitly.
    powers : tuple of float, optional
        Exponents for a custom basis.  Ignored unless kind == "custom".
    multiplier : float
        Scalar applied uniformly to every column, default 1.
    """

    kind: str = "linear"
    powers: tuple = None
    multiplier: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(
                f"unknown basis kind {self.kind!r}; expected one of {_KINDS}"
            )
        if self.kind == "custom":
            if not self.powers:
                raise ValidationError("custom basis requires a non-empty powers tuple")
            powers = tuple(float(p) for p in self.powers)
            if len(set(powers)) != len(powers):
                raise ValidationError("custom basis powers must be distinct")
            object.__setattr__(self, "powers", powers)
        elif self.powers is not None:
            raise ValidationError("powers may only be given for a custom basis")
        if not np.isfinite(self.multiplier) or self.multiplier == 0.0:
            raise ValidationError("multiplier must be finite and nonzero")

    @classmethod
    def linear(cls, multiplier=1.0):
        return cls(kind="linear", multiplier=multiplier)

    @classmethod
    def quadratic(cls, multiplier=1.0):
        return cls(kind="quadratic", multiplier=multiplier)

    @classmethod
    def custom(cls, powers, multiplier=1.0):
        return cls(kind="custom", powers=tuple(powers), multiplier=multiplier)

    @classmethod
    def from_name(cls, name):
        """Resolve a CLI-style name ("linear" or "quadratic")."""
        if name in ("linear", "quadratic"):
            return cls(kind=name)
        raise ValidationError(f"unknown basis name {name!r}")

    def resolved_powers(self):
        if self.kind == "linear":
            return (1.0,)
        if self.kind == "quadratic":
            return (1.0, 2.0)
        return self.powers

    @property
    def r(self):
        return len(self.resolved_powers())


@dataclass(frozen=True)
class FyMatrix:
    """Centered basis-function matrix of shape (n, r)."""

    F: np.ndarray
    spec: BasisSpec = field(default_factory=BasisSpec)

    def __post_init__(self):
        F = np.asarray(self.F, dtype=np.float64)
        if F.ndim != 2:
            raise ValidationError("F must be 2-D")
        if not np.all(np.isfinite(F)):
            raise ValidationError("F contains non-finite entries")
        means = np.abs(F.mean(axis=0))
        if means.size and means.max() >= 1e-12:
            raise ValidationError(
                f"F columns must be centered; max |column mean| = {means.max():.3g}"
            )
        F = F.copy()
        F.setflags(write=False)
        object.__setattr__(self, "F", F)

    @property
    def n(self):
        return self.F.shape[0]

    @property
    def r(self):
        return self.F.shape[1]


def build_fy(y, spec=None):
    """Build the centered basis matrix f_y for a response vector.

    Each column is y**k minus its sample mean, all scaled by the spec's
    multiplier.  Raises ``DegenerateBasisError`` for a constant response and
    ``CollinearityError`` when the resulting columns are linearly dependent
    (rank checked by QR with tolerance 1e-10 times the largest column norm).
    """
    if spec is None:
        spec = BasisSpec()
    y = as_vector(y, name="y")
    powers = spec.resolved_powers()
    r = len(powers)
    if y.size < r + 1:
        raise ValidationError(f"need at least {r + 1} observations for r={r} basis")
    if np.ptp(y) == 0.0:
        raise DegenerateBasisError("response is constant; basis would be all zeros")
    cols = []
    for k in powers:
        col = y**k
        cols.append(col - col.mean())
    F = spec.multiplier * np.column_stack(cols)
    R = np.linalg.qr(F, mode="r")
    col_norms = np.linalg.norm(F, axis=0)
    tol = 1e-10 * col_norms.max()
    if np.sum(np.abs(np.diag(R)) > tol) < r:
        raise CollinearityError("basis columns are collinear for this response")
    return FyMatrix(F=F, spec=spec)
