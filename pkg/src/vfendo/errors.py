"""Exception types shared across the package."""


class ResourceLimit(RuntimeError):
    """A configured size guard (word length, enumeration cap) was exceeded."""


class InvalidInput(ValueError):
    """Malformed presentation, endomorphism, or element."""
