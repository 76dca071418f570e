"""Exception types shared across the package."""


class InputError(Exception):
    """Unusable input: missing file, unparseable schema, no benchmark overlap."""


class InvariantError(Exception):
    """An internal consistency check failed; indicates a bug, not bad input."""
