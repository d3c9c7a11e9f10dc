class AmplikitError(Exception):
    """Base class for solver errors."""


class NotFound(AmplikitError):
    """Las Vegas bottom: the final check failed, no output is produced."""


class BudgetExceeded(AmplikitError):
    """Restart cap or work limit hit; signals a non-conforming source or
    parameters whose enumeration cost is beyond the configured budget."""
