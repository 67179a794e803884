"""Exception types shared across the package."""


class DimMismatchError(ValueError):
    """Operands have incompatible dimensions."""


class NonCommutingError(ValueError):
    """A tuple of matrices fails the pairwise commutation gate."""


class NoConvergenceError(RuntimeError):
    """An iterative refinement exceeded its sweep cap without meeting tolerance."""


class NonFiniteError(ValueError):
    """A scalar function returned NaN or infinity on a spectrum point."""


class BadLawError(ValueError):
    """Unsupported spectrum law for the random tuple generator."""


class BadExponentError(ValueError):
    """Exponent outside the admissible range for the requested norm."""


class NegativeTimeError(ValueError):
    """The singular value function is only defined for t >= 0."""


class DomainError(ValueError):
    """Argument outside the function's domain."""


class GuardViolationError(ValueError):
    """A runtime guard (cheap precondition) was violated."""


class AliasRiskError(ValueError):
    """The requested grid is too small to represent all occurring frequencies."""


class NonIntegerSpectrumError(ValueError):
    """Eigenvalue table is not integer-valued within the rounding gate."""
