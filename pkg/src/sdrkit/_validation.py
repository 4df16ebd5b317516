"""Input validation helpers used across the public API."""

import numpy as np

from .exceptions import ValidationError


def as_matrix(X, name="X"):
    """Coerce to a 2-D float64 array with finite entries."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f"{name} must be a 2-D array, got ndim={X.ndim}")
    if not np.all(np.isfinite(X)):
        raise ValidationError(f"{name} contains non-finite entries")
    return X


def as_vector(y, name="y"):
    """Coerce to a 1-D float64 array with finite entries."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValidationError(f"{name} must be a 1-D array, got ndim={y.ndim}")
    if not np.all(np.isfinite(y)):
        raise ValidationError(f"{name} contains non-finite entries")
    return y


def check_consistent_rows(X, y, x_name="X", y_name="y"):
    if X.shape[0] != y.shape[0]:
        raise ValidationError(
            f"{x_name} has {X.shape[0]} rows but {y_name} has length {y.shape[0]}"
        )


def check_binary_matrix(X, name="X"):
    """Validate that every entry of X is exactly 0 or 1."""
    X = as_matrix(X, name=name)
    if not np.all((X == 0.0) | (X == 1.0)):
        raise ValidationError(f"{name} must contain only 0/1 entries")
    return X


def binary_columns(X):
    """Boolean mask of columns whose entries are all exactly 0 or 1."""
    X = np.asarray(X, dtype=np.float64)
    return np.all((X == 0.0) | (X == 1.0), axis=0)
