"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class VerificationFailure(Exception):
    """A verifier found violations (CLI exit code 1)."""


class ConstraintError(InputError):
    """A certificate precondition does not hold; message names the bound."""


class DegenerateMetricError(InputError):
    """Metric has a zero off-diagonal distance, so tree volume would vanish."""
