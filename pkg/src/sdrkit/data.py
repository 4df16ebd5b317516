"""Dataset container and CSV loading."""

import csv
from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, as_vector, binary_columns, check_consistent_rows
from .exceptions import ValidationError


@dataclass(frozen=True)
class Dataset:
    """An n x p predictor matrix with its response and column metadata.

    ``is_binary[j]`` asserts that every entry of column j is exactly 0 or 1;
    the assertion is validated at construction.  Instances are immutable.
    """

    X: np.ndarray
    y: np.ndarray
    is_binary: np.ndarray = None
    column_names: tuple = None

    def __post_init__(self):
        X = as_matrix(self.X, name="X")
        y = as_vector(self.y, name="y")
        check_consistent_rows(X, y)
        if X.shape[0] < 2:
            raise ValidationError("need at least 2 observations")
        if X.shape[1] < 1:
            raise ValidationError("need at least 1 predictor")
        if self.is_binary is None:
            flags = np.zeros(X.shape[1], dtype=bool)
        else:
            flags = np.asarray(self.is_binary, dtype=bool)
            if flags.shape != (X.shape[1],):
                raise ValidationError("is_binary must have one flag per column")
            actual = binary_columns(X)
            bad = np.flatnonzero(flags & ~actual)
            if bad.size:
                names = self._names_for(bad)
                raise ValidationError(
                    f"columns flagged binary contain non-0/1 values: {names}"
                )
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != X.shape[1]:
                raise ValidationError("column_names must have one entry per column")
            object.__setattr__(self, "column_names", names)
        X = X.copy()
        X.setflags(write=False)
        y = y.copy()
        y.setflags(write=False)
        flags = flags.copy()
        flags.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "is_binary", flags)

    def _names_for(self, indices):
        if self.column_names is None:
            return [int(j) for j in indices]
        return [self.column_names[j] for j in indices]

    @classmethod
    def with_inferred_flags(cls, X, y, column_names=None):
        """Build a Dataset, marking as binary every column that is 0/1."""
        X = as_matrix(X, name="X")
        return cls(X=X, y=y, is_binary=binary_columns(X), column_names=column_names)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def all_binary(self):
        return bool(self.is_binary.all())

    def select_columns(self, indices):
        """New Dataset keeping only the given predictor columns, order preserved."""
        indices = np.asarray(indices, dtype=int)
        if indices.size == 0:
            raise ValidationError("cannot select zero columns")
        names = None
        if self.column_names is not None:
            names = tuple(self.column_names[j] for j in indices)
        return Dataset(
            X=self.X[:, indices],
            y=self.y,
            is_binary=self.is_binary[indices],
            column_names=names,
        )


def load_csv(path, response):
    """Load a Dataset from a headed CSV file.

    One column, named by ``response``, is the response; the remaining
    columns are predictors in file order.  Binary columns are detected and
    flagged automatically.  Errors name the offending row or field.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if response not in header:
            raise ValidationError(
                f"{path}: response column {response!r} not found in header {header}"
            )
        y_col = header.index(response)
        pred_names = [h for i, h in enumerate(header) if i != y_col]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            parsed = []
            for name, field in zip(header, row):
                try:
                    parsed.append(float(field))
                except ValueError:
                    raise ValidationError(
                        f"{path}: row {lineno}, column {name!r}: "
                        f"could not parse {field!r} as a number"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=np.float64)
    y = table[:, y_col]
    X = np.delete(table, y_col, axis=1)
    return Dataset.with_inferred_flags(X, y, column_names=pred_names)
