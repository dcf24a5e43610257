"""Exception types shared across the package."""


class GPJError(Exception):
    """Base class for all package errors."""


class DomainError(GPJError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketNonpositive(GPJError):
    """min_xi B(xi; eta) <= 0: the flow map is no longer a diffeomorphism."""

    def __init__(self, eta, min_bracket):
        super().__init__(f"bracket non-positive at eta={eta!r} (min B={min_bracket!r})")
        self.eta = eta
        self.min_bracket = min_bracket


class QuadratureFailure(GPJError):
    """Adaptive quadrature could not reach the tolerance within its panel budget."""


class Undecidable(GPJError):
    """A divergence / membership test did not reach a verdict within its budget."""


class BeyondBlowup(GPJError):
    """A flow quantity was requested at or after the detected singular time."""


class NumericalFailure(GPJError):
    """Time integration broke down (step underflow, NaN, instability)."""
