"""Exception hierarchy shared across the toolkit.

``ValidationError`` and its subclasses signal bad inputs or requests the
data cannot support (CLI exit code 1); ``NumericalError`` signals a
computation that broke down despite valid inputs (CLI exit code 2).
"""


class ValidationError(ValueError):
    """Invalid input data, configuration, or request."""


class DegenerateBasisError(ValidationError):
    """Response basis cannot be built (e.g. constant response)."""


class CollinearityError(ValidationError):
    """A design or basis matrix is rank deficient."""


class RankDeficiencyError(ValidationError):
    """More directions requested than the target matrix supports."""

    def __init__(self, message, achievable_rank=None):
        super().__init__(message)
        self.achievable_rank = achievable_rank


class EmptyDataError(ValidationError):
    """An operation received zero observations."""


class EmptyReductionError(ValidationError):
    """Screening removed every predictor."""

    def __init__(self, message, records=()):
        super().__init__(message)
        self.records = tuple(records)


class DegenerateLoadingError(ValidationError):
    """All latent loadings are zero; the reduction direction is undefined."""


class NumericalError(RuntimeError):
    """A numerical routine failed (non-finite values, broken ascent, ...)."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
