"""Exception hierarchy shared by every module."""

from __future__ import annotations


class SipwError(Exception):
    """Base class for all package errors."""


class InvalidParams(SipwError, ValueError):
    pass


class OutOfDomain(SipwError, ValueError):
    def __init__(self, x: float, domain: object) -> None:
        super().__init__(f"x={x!r} lies outside the open domain {domain}")
        self.x = x
        self.domain = domain


class ComplexFamily(SipwError, TypeError):
    """Raised when a complex-valued family is evaluated in real mode."""


class TrivialOnlyFamily(SipwError, ValueError):
    """The family admits no nontrivial deformation terms."""


class PoleError(SipwError, ArithmeticError):
    def __init__(self, x: float, message: str | None = None) -> None:
        super().__init__(message or f"deformation term has a pole at x={x!r}")
        self.x = x


class BlowUp(SipwError, ArithmeticError):
    def __init__(self, x: float) -> None:
        super().__init__(f"Bernoulli trajectory blew up near x={x!r}")
        self.x = x


class QuadratureFailure(SipwError, ArithmeticError):
    pass


class DegenerateDenominator(SipwError, ZeroDivisionError):
    pass


class NoNontrivialSolution(SipwError):
    """No pair of Bernoulli constants satisfies the algebraic compatibility condition."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class PoleOnGrid(SipwError, ValueError):
    def __init__(self, message: str, indices=()) -> None:
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)


class SingularFamilyParams(SipwError, ValueError):
    def __init__(self, message: str, rung: int | None = None) -> None:
        super().__init__(message)
        self.rung = rung


class NonHermitianFamily(SingularFamilyParams, ComplexFamily):
    """Spectral operations are undefined for the non-Hermitian family."""
