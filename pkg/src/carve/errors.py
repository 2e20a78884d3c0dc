"""Exception and warning types shared across the package.

Two error families matter to callers: `ValidationError` for arguments or
data that violate a documented precondition, and `ParseError` for bytes
that cannot be decoded (attention dumps, images, CSV). The CLI maps them
to exit codes 2 and 3 respectively.
"""


class CarveError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CarveError, ValueError):
    """An argument or value violates a documented precondition."""


class ParseError(CarveError):
    """Input bytes could not be decoded into the requested structure."""


class DumpMagicError(ParseError):
    """Attention dump does not start with the expected magic bytes."""


class DumpVersionError(ParseError):
    """Attention dump declares an unsupported format version."""


class DumpTruncatedError(ParseError):
    """Attention dump ends before the declared header or payload does."""


class DumpHeaderError(ParseError):
    """Attention dump header is not valid JSON or has bad fields."""


class DumpContiguityError(DumpHeaderError):
    """Attention dump declares a step list with gaps or disorder."""


class DumpValueError(ParseError):
    """Attention dump payload contains values that cannot be weights."""


class ImageDecodeError(ParseError):
    """Image bytes could not be decoded as PNG or JPEG."""


class CsvFormatError(ParseError):
    """A CSV input does not follow the documented schema."""


class DumpWarning(UserWarning):
    """A dump was readable but needed repair (e.g. re-normalization)."""


class EmptyMaskWarning(UserWarning):
    """A carve mask kept no pixels; the original image was passed through."""
