"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation problems exit
with 2, numerical failures with 3.
"""


class ValidationError(ValueError):
    """Bad input: wrong domain, malformed file, inconsistent arguments."""


class ResourceError(ValidationError):
    """A requested computation exceeds a configured resource cap."""


class NumericalError(RuntimeError):
    """A computation ran but produced no usable result."""
