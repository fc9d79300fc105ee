"""Exception types shared across the package."""


class GammaStatError(Exception):
    """Base class."""


class BudgetExceeded(GammaStatError):
    """A search or construction would exceed a configured budget."""


class InvalidGroupSpec(GammaStatError, ValueError):
    """Malformed group data: non-associative table, bad action, and so on."""


class NotNormal(GammaStatError, ValueError):
    pass


class NotAdmissible(GammaStatError, ValueError):
    """A measure-facing operation received a non-admissible Gamma-group."""


class PreconditionError(GammaStatError, ValueError):
    pass


class UnverifiedFactorError(GammaStatError):
    """A relation factor lies outside what the engine can enumerate exactly."""


class InternalCheckFailed(GammaStatError, AssertionError):
    """A built-in self-check failed; this signals a bug, not bad input."""
