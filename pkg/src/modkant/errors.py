"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid selector, parameter combination or experiment configuration."""


class DomainError(ValueError):
    """Argument outside the domain of a function (negative eta argument, pole crossing)."""


class QuadratureError(RuntimeError):
    """A quadrature routine failed to converge.

    The best available estimate is kept in ``partial`` so callers can decide
    whether it is usable.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DivergenceError(RuntimeError):
    """An iterative search (e.g. a Luxemburg norm bracket) ran away."""
