"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Objects with incompatible word lengths were combined."""


class CapacityError(ValueError):
    """A requested chain length exceeds the materialization limits."""


class FieldMismatchError(ValueError):
    """Fields or potentials living on different graphs or in different
    numeric modes were combined."""


class SolverError(ArithmeticError):
    """A linear solve failed (singular system, or an iterative solve that
    did not reach the requested residual)."""
