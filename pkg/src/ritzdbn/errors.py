"""Exception types raised by the solver stack."""


class RitzError(Exception):
    """Base class for all solver errors."""


class NonFiniteIntegrand(RitzError):
    """A quadrature node evaluated to NaN or infinity."""


class NonPositiveCoefficient(RitzError):
    """An element integral of the diffusion coefficient is not positive."""


class DegenerateRankOne(RitzError):
    """Sherman-Morrison denominator of the penalised system is not positive."""


class DegenerateConstraint(RitzError):
    """The bordered (KKT) system has a vanishing Schur complement."""


class SingularReducedHessian(RitzError):
    """Sherman-Morrison denominator of the reduced Hessian vanished."""


class ZeroDenominator(RitzError):
    """A relative quantity was requested against a zero reference norm."""


class DomainError(RitzError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnknownProblem(RitzError, KeyError):
    """Problem tag not present in the catalog."""

    def __str__(self):
        return f"unknown problem {self.args[0]!r}" if self.args else "unknown problem"


class LineSearchFailure(RitzError):
    """A quasi-Newton line search could not satisfy the Wolfe conditions."""
