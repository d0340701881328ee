"""Exception types shared across the package."""


class GpPdeError(Exception):
    """Base class for errors raised by this package."""


class OrderError(GpPdeError, ValueError):
    """Derivative order outside the supported range (0..2 per argument and dimension)."""


class KernelDomainError(GpPdeError, ValueError):
    """Kernel evaluated outside its mathematical domain beyond round-off."""


class UnknownLabelError(GpPdeError, KeyError):
    """A label was requested that the block kernel or training set does not define."""


class FactorizationError(GpPdeError):
    """Cholesky factorization failed even at the largest permitted jitter."""

    def __init__(self, message, jitter=None):
        super().__init__(message)
        self.jitter = jitter


class TrainingError(GpPdeError):
    """Hyperparameter optimization could not produce a usable iterate."""


class StateMismatchError(GpPdeError, ValueError):
    """Gaussian state fields are inconsistent with each other or with the training set."""


class UndefinedNormError(GpPdeError, ZeroDivisionError):
    """Relative error is undefined because the reference norm vanishes."""


class OracleError(GpPdeError):
    """A reference-solution quadrature failed its self-consistency check."""


class TableauError(GpPdeError, ValueError):
    """Butcher tableau not supported by the stage-kernel builder."""
