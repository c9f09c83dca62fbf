"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes, so raising the right class
matters: usage/config -> 1, data/schema -> 2, numeric -> 3.
"""


class CcnetsError(Exception):
    """Base class for all library errors."""


class DimensionError(CcnetsError):
    """Tensor shapes are incompatible for the requested operation."""


class ConfigError(CcnetsError):
    """Unknown or inconsistent configuration value."""


class StateError(CcnetsError):
    """Operation invoked in an invalid order (e.g. backward before forward)."""


class NumericError(CcnetsError):
    """Non-finite value produced where finite math is required."""


class SchemaError(CcnetsError):
    """Input file columns do not match the expected schema."""


class ParseError(CcnetsError):
    """A cell in an input file could not be parsed."""


class DomainError(CcnetsError):
    """A value is outside the operation's domain (empty set, non-binary label, ...)."""
