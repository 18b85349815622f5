"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain of an operation (e.g. x not in [c,1])."""


class OmegaExhaustedError(DomainError):
    """A finite omega word was shorter than the number of requested steps."""


class CapExceededError(RuntimeError):
    """An exact closure grew past its diagnostic node cap."""


class NonMarkovPartitionError(RuntimeError):
    """A cell image failed to align with the partition (should not happen for rational c)."""


class NonUniqueDensityError(RuntimeError):
    """The transfer operator fixed point was not one-dimensional."""
