"""Exception types shared across the package."""


class MvskError(Exception):
    """Base class for all package-specific errors."""


class ParseError(MvskError):
    """Malformed returns CSV: ragged row, non-numeric cell, or bad header."""


class InsufficientSamples(MvskError):
    """Fewer than two observations per asset; the unbiased variance needs m >= 2."""


class DimensionError(MvskError):
    """Vector or matrix dimensions incompatible with the model."""


class DomainError(MvskError):
    """Argument outside its admissible range."""


class NumericalError(MvskError):
    """Non-finite value encountered during an iterative computation."""

    def __init__(self, message, iteration=None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration
