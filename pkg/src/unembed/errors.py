"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible dimensions (d or k disagree)."""


class ZeroVectorError(ValueError):
    """An operation that needs a nonzero vector received a zero vector."""


class ModelFormatError(ValueError):
    """A model file failed to parse or violates the format grammar."""


class LpIndeterminateError(RuntimeError):
    """The LP solver could not reach a verdict (iteration cap or failed
    witness validation); never silently mapped to feasible/infeasible."""


class ConsistencyError(RuntimeError):
    """Two independent routes to the same answer disagreed."""
