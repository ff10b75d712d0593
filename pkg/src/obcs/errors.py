"""Error types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(ValueError):
    """Input is structurally valid but degenerate for the requested operation
    (for example, normalizing or taking the direction of the zero vector)."""


class ResourceLimitError(RuntimeError):
    """A configured search or iteration budget was exhausted before the
    computation could finish. Raised instead of returning a possibly wrong
    answer."""
