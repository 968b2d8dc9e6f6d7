"""Exception hierarchy shared across the package.

Every domain failure raises a subclass of :class:`CrnForgeError`, so the CLI
can map "the input violated a mathematical precondition" to exit code 1 while
genuine bugs propagate as ordinary tracebacks.
"""

from __future__ import annotations


class CrnForgeError(Exception):
    """Base class for all domain errors raised by crnforge."""


class DimensionMismatchError(CrnForgeError):
    """A vector or matrix has the wrong length for the system at hand."""


class SingularMatrixError(CrnForgeError):
    """A matrix required to be invertible is numerically singular."""


class NotKineticError(CrnForgeError):
    """The system has cross-negative terms where a kinetic one is required.

    ``terms`` holds the offending ``(equation_index, Monomial)`` pairs.
    """

    def __init__(self, terms, message: str = "system is not kinetic"):
        self.terms = list(terms)
        offenders = ", ".join(
            f"eq {i}: coeff={m.coeff:g}, exponents={list(m.exponents)}"
            for i, m in self.terms
        )
        super().__init__(f"{message}; cross-negative terms: [{offenders}]")


class EmptySystemError(CrnForgeError):
    """All equations of the system are identically zero."""


class TermNotCrossNegativeError(CrnForgeError):
    """A QSSA target term is not a cross-negative term of its equation."""


class PNotPositiveError(CrnForgeError):
    """A QSSA auxiliary polynomial is not strictly positive where required."""


class ConstraintViolationError(CrnForgeError):
    """One or more constraint-set predicates failed.

    ``failed`` lists ``(name, value)`` pairs for the violated predicates.
    """

    def __init__(self, failed):
        self.failed = list(failed)
        desc = ", ".join(f"{name} (value {value:g})" for name, value in self.failed)
        super().__init__(f"constraint set violated: {desc}")


class UnsupportedDimensionError(CrnForgeError):
    """The operation is only implemented for a restricted dimension."""


class ParseError(CrnForgeError):
    """Syntax error in a reaction-network text file."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class IntegrationError(CrnForgeError):
    """Numerical integration failed in a way the caller cannot recover from."""


class LoopTrackingError(IntegrationError):
    """The homoclinic-loop tracker drifted off the invariant curve."""


class MelnikovError(CrnForgeError):
    """The two independent Melnikov quadrature routes disagree."""


class StiffnessError(IntegrationError):
    """Integration failed for a stiffness-related reason; carries mu."""

    def __init__(self, mu: float, message: str):
        self.mu = mu
        super().__init__(f"mu={mu:g}: {message}")
