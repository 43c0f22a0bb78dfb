"""Exception and warning types shared across the package."""


class CplError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class NumericError(CplError):
    exit_code = 2


class NonConvergence(NumericError):
    """Quadrature or series refinement budget exhausted before tolerance."""


class DegenerateStep(NumericError):
    """Finite-difference step vanished relative to the evaluation point."""


class DivergentStaticLimit(CplError):
    """Conducting permittivity requested at zero frequency."""


class DomainError(CplError, ValueError):
    """Argument outside the domain where a closed form is defined."""


class ModelMismatch(CplError, ValueError):
    """Operation requires a material model feature that is switched off."""


class FitFailure(NumericError):
    """Entropy curve cannot be fitted (non-monotonic beyond noise)."""


class ConfigError(CplError, ValueError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class CancellationWarning(UserWarning):
    """Thermal correction is not resolved above the numeric noise floor."""


class PolarizabilityWarning(UserWarning):
    pass
