"""Exception hierarchy.

Two families matter to callers: :class:`DomainError` for invalid input
(the CLI maps it to exit status 2) and :class:`NumericalError` for
computations that could not be certified (exit status 3).
"""


class PartialThetaError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PartialThetaError, ValueError):
    """Arguments outside the documented domain."""


class NumericalError(PartialThetaError, ArithmeticError):
    """A numerical procedure failed to reach a certified answer."""


# zero finding
class ContourTooCloseToZero(NumericalError):
    pass


class NonIntegerCount(NumericalError):
    pass


class BudgetExceeded(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DoubleZeroSuspected(NumericalError):
    def __init__(self, msg, z=None):
        super().__init__(msg)
        self.z = z


class CountMismatch(NumericalError):
    pass


# spectrum
class DegenerateJacobian(NumericalError):
    pass


class MissedIndex(NumericalError):
    pass


class OrderingUnresolved(NumericalError):
    pass


class MixedBranches(DomainError):
    pass


# continuation
class SpectrumTooClose(DomainError):
    pass


class EndpointMismatch(DomainError):
    pass


class StepCollapse(NumericalError):
    pass


class Collision(NumericalError):
    pass


# density
class SignPatternViolated(NumericalError):
    pass
