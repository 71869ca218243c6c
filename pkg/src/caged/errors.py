"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """An argument violates a documented precondition."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size limit."""


class UnsupportedHypothesisError(RuntimeError):
    """The requested closed-form path does not apply to these inputs."""
