"""Exception types raised by relqfi."""


class DetectorError(Exception):
    """Base class for all relqfi errors."""


class NonConvergence(DetectorError, ArithmeticError):
    """Regulator extrapolation did not reach the requested tolerance."""


class WindowTooSmall(DetectorError, ArithmeticError):
    """Truncated integration window leaves a tail above tolerance."""


class StepTooLarge(DetectorError, ArithmeticError):
    """ODE integrator could not hold its local error below tolerance."""


class BranchAmbiguity(DetectorError, ValueError):
    """A pure Bloch vector has a derivative pointing off the sphere."""


class NonPhysicalDensity(DetectorError, ValueError):
    """Density matrix (or Bloch vector) outside the physical set."""


class DerivativeUnstable(DetectorError, ArithmeticError):
    """Finite-difference derivative is not stable under step refinement."""


class FormulaDomainError(DetectorError, ValueError):
    """Closed-form expression evaluated outside its domain."""


class UnknownFigure(DetectorError, KeyError):
    """Requested figure preset does not exist."""

    def __str__(self):
        return Exception.__str__(self)


class ConfigInvalid(DetectorError, ValueError):
    """Sweep or CLI configuration failed validation.

    ``problems`` holds ``(field, message)`` pairs, one per failing field.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        msg = "; ".join(f"{field}: {why}" for field, why in self.problems)
        super().__init__(msg or "invalid configuration")
