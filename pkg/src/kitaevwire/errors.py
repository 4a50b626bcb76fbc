"""Exception hierarchy shared across the package."""


class KitaevWireError(Exception):
    """Base class for all package errors."""


class ConfigError(KitaevWireError):
    """Invalid physical configuration, config file, or CLI input."""


class NumericalError(KitaevWireError):
    """A numerical procedure failed to meet its accuracy contract."""


class EigensolverError(NumericalError):
    """Dense eigendecomposition failed or produced an inconsistent spectrum."""


class SymmetryViolationError(NumericalError):
    """Particle-hole pairing of eigenmodes could not be established."""


class SingularPropagatorError(NumericalError):
    """The frequency-domain response matrix is singular or too ill-conditioned."""

    def __init__(self, omega: float, condition: float):
        self.omega = omega
        self.condition = condition
        super().__init__(
            f"response matrix at omega={omega!r} is numerically singular "
            f"(condition estimate {condition:.3e} > 1e14)"
        )


class QuadratureError(NumericalError):
    """Adaptive frequency integration did not reach the requested tolerance."""
