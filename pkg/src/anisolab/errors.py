"""Exception types shared across the package."""


class AnisolabError(Exception):
    """Base class for package-specific errors."""


class DomainError(AnisolabError, ValueError):
    """Input outside the mathematical domain of an operation (non-finite, wrong shape)."""


class SingularPointError(AnisolabError, ValueError):
    """Derivative of a 1-homogeneous function requested at the origin."""


class SmoothnessError(AnisolabError):
    """Derivative requested where the declared smoothness does not support it."""


class InvalidMatrixError(AnisolabError, ValueError):
    """Matrix fails a symmetry or positive-definiteness requirement."""


class ConvergenceError(AnisolabError, RuntimeError):
    """Iterative procedure exhausted its budget.  Carries the best iterate found."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class ProfileError(AnisolabError, ValueError):
    """Radial profile violates its defining conditions."""


class InconsistencyError(AnisolabError):
    """Declared structural parameters contradict sampled behaviour."""


class AdmissibilityError(AnisolabError, ValueError):
    """Requested geometric object does not fit inside the computational domain."""


class ConfigError(AnisolabError, ValueError):
    """Malformed experiment configuration."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"[{field}] {message}")
        self.field = field
