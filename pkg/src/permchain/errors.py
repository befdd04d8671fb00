class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions."""


class ResourceLimitError(RuntimeError):
    """A configured size cap would be exceeded."""


class VerificationError(AssertionError):
    """A verification check failed."""
