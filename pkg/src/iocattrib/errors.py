"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: parse/validation problems exit 2,
configuration problems exit 3, model/runtime failures exit 4.
"""


class IocAttribError(Exception):
    """Base class for all package errors."""


class ParseError(IocAttribError):
    """Malformed input content (bad cell, unknown token, broken JSON)."""


class ValidationError(IocAttribError):
    """Structurally parseable input that violates a semantic invariant."""


class ConfigError(IocAttribError):
    """Invalid or incomplete run configuration."""


class ModelError(IocAttribError):
    """Model fitting or prediction failed at runtime."""
