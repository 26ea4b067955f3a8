"""Exception types raised across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input (dimension mismatch, bad parameter)."""


class ConditioningOnNullError(ZeroDivisionError):
    """Conditioning on a proposition of zero (or numerically negligible) weight."""

    def __init__(self, message, value=None, factor=None):
        super().__init__(message)
        self.value = value
        self.factor = factor


class NonCommutingError(ValueError):
    """A commuting family was required but a pair fails to commute."""

    def __init__(self, message, pair=None, norm=None):
        super().__init__(message)
        self.pair = pair
        self.norm = norm


class OracleStarvationError(RuntimeError):
    """A Monte Carlo run accepted no trials; increase the trial count."""
