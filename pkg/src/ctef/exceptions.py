"""Exception types raised by the fitting library."""


class DimensionError(ValueError):
    """Array shapes are inconsistent with the ambient dimension."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. a non-unit vector)."""


class DegenerateDataError(ValueError):
    """The data do not support a fit (too few points, zero extent, ...)."""


class SolverError(RuntimeError):
    """The least-squares solver could not make progress."""
