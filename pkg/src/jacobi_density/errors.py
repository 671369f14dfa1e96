"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid run configuration; ``path`` names the offending field (e.g. ``b[0]``)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class BandStructureError(ArithmeticError):
    """Band edges could not be resolved into 2t real roots of S(x)^2 - 4."""


class NonConvergedQuadrature(ArithmeticError):
    """A quadrature missed its tolerance after the refinement cap."""

    def __init__(self, message: str, estimate: float = float("nan"), error: float = float("nan"), z=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.z = z


class UnsupportedForEmpirical(ValueError):
    """Raised when a tabulated g is used where the scaling function itself is needed."""
