"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input (CLI exit code 1)."""


class ResourceError(RuntimeError):
    """A configured resource guard was hit (CLI exit code 3)."""
