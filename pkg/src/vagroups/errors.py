"""Exception types shared across the package."""


class GroupBuildError(ValueError):
    """Raised when affine generators do not define a valid finite extension."""


class BudgetExceededError(RuntimeError):
    """An enumeration (census, image closure) exceeded its configured budget."""


class InconclusiveError(RuntimeError):
    """A bounded search ran out of budget without reaching a decision.

    Distinct from a negative answer: callers must not coerce this to "no".
    """


class CertificateRequiredError(ValueError):
    """An operation that needs a crystal-like certificate was called without one."""
