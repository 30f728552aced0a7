"""Exception types raised across the package."""


class QBTError(Exception):
    """Base class for all errors raised by :mod:`qbt`."""


class DomainError(QBTError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PoleArgument(DomainError):
    """An argument sits on (or numerically next to) a pole."""


class DegeneratePoles(QBTError, ArithmeticError):
    """Two susceptibility pole rates coincide, so partial fractions break down."""


class DegenerateModes(QBTError, ArithmeticError):
    """Two normal-mode frequencies coincide in the residue formula."""


class NotPositiveDefinite(QBTError, ValueError):
    """The total quadratic Hamiltonian is not positive definite."""


class ImaginaryResidue(QBTError, ArithmeticError):
    """A physical quantity kept an imaginary part after conjugate-pair summation."""


class SeriesNotConverged(QBTError, ArithmeticError):
    """An infinite series hit ``max_terms`` before meeting its tolerance."""


class QuadratureFailure(QBTError, ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance."""


class ConfigError(QBTError, ValueError):
    """Invalid user configuration; the message names the offending field."""
