"""Exception types shared across the package."""


class InvalidDimensionError(ValueError):
    """Fock-space dimension too small, or operand dimensions disagree."""


class NumericError(ArithmeticError):
    """An operation received or produced non-finite or inconsistent numbers."""


class MetricViolationError(ValueError):
    """A purported metric fails Hermiticity or positive definiteness."""


class ExceptionalPointError(ValueError):
    """A closed-form construction is singular at the symmetry-breaking threshold."""


class InvariantBasisError(RuntimeError):
    """A supplied basis fails to diagonalize the Schrodinger operator."""


class ProjectionDeficitError(ValueError):
    """An initial state is not representable in the supplied mode basis."""


class ConfigError(ValueError):
    """Malformed run configuration (CLI exit code 2)."""


class IntegrationOverflowError(RuntimeError):
    """State growth exceeded the overflow cap.

    The partial result accumulated before the cap tripped is attached so
    callers can still use the trustworthy early part of the run.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
