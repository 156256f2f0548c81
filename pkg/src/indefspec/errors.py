"""Exception hierarchy shared by the solver modules and the CLI."""


class IndefSpecError(Exception):
    """Base class for every error raised by this package."""


class PoleProximity(IndefSpecError, ValueError):
    """Argument lies within the pole-exclusion radius of tan(sqrt(u))/sqrt(u)."""

    def __init__(self, u, pole, radius):
        self.u = u
        self.pole = pole
        self.radius = radius
        super().__init__(
            f"argument u={u!r} is within {radius:g} of the pole ((k+1/2)pi)^2={pole!r}"
        )


class DeltaOutOfRange(IndefSpecError, ValueError):
    pass


class DomainError(IndefSpecError, ValueError):
    pass


class BracketNotFound(IndefSpecError, RuntimeError):
    pass


class NewtonDivergence(IndefSpecError, RuntimeError):
    pass


class ContinuationStall(IndefSpecError, RuntimeError):
    pass


class RootResidualTooLarge(IndefSpecError, ValueError):
    pass


class NoConvergence(IndefSpecError, RuntimeError):
    pass


class DegenerateInput(IndefSpecError, ValueError):
    """Raised when an error sequence contains an exact zero."""


class InvalidGrid(IndefSpecError, ValueError):
    pass
