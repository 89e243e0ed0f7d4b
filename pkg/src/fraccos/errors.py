"""Exception types raised across the package."""


class FraccosError(Exception):
    """Base class for all numerical failures reported by this package."""


class DomainError(FraccosError, ValueError):
    """An argument lies outside the documented evaluation domain."""


class ConvergenceError(FraccosError, ArithmeticError):
    """A series or iteration hit its term cap before meeting its tolerance."""


class SingularityError(FraccosError, ArithmeticError):
    """A matrix that must be inverted is (numerically) singular."""


class HypothesisError(FraccosError):
    """The hypothesis of a perturbation lemma is not met (theta >= 1)."""


class QuadratureError(FraccosError, ArithmeticError):
    """Quadrature refinement stalled above the requested tolerance."""


class TailTooLargeError(FraccosError):
    """A truncated Laplace integral cannot be certified to the requested tolerance."""
