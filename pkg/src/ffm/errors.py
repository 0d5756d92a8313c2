"""Exception types raised across the package.

Every error derives from :class:`FFMError` so callers (and the CLI) can catch
one base class. Most also subclass the closest builtin so plain ``except
ValueError`` keeps working.
"""


class FFMError(Exception):
    """Base class for all package errors."""

    kind = "error"


class InputDomainError(FFMError, ValueError):
    kind = "input-domain"


class DimensionError(FFMError, ValueError):
    kind = "dimension"


class ConfigurationError(FFMError, ValueError):
    kind = "configuration"


class DegenerateInputError(FFMError, ValueError):
    kind = "degenerate-input"


class FormatError(FFMError, ValueError):
    kind = "format"


class ParseError(FormatError):
    kind = "parse"


class SchemaError(FormatError):
    kind = "schema"


class EmptyStreamError(FFMError, ValueError):
    kind = "empty-stream"


class UndefinedMetricError(FFMError, ValueError):
    kind = "undefined-metric"


class FFMIndexError(FFMError, IndexError):
    kind = "index"


class FFMIOError(FFMError, OSError):
    kind = "io"
