"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems exit 1, data/format
problems exit 2, numeric failures exit 3.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class CrosstextError(Exception):
    """Base class for all package errors."""


class UsageError(CrosstextError):
    """Bad invocation: missing/unknown config keys, bad flag values."""

    exit_code = EXIT_USAGE


class DataError(CrosstextError):
    """Malformed or insufficient input data."""

    exit_code = EXIT_DATA


class ParseError(DataError):
    """A dataset line does not match the expected TSV layout."""


class UnknownLabelError(DataError):
    """A raw label is neither canonical nor in the known-typo set."""


class EmbeddingFormatError(DataError):
    """An embedding file does not match the documented text format."""


class InsufficientDictionaryError(DataError):
    """Too few shared word types to fit a full-rank orthogonal map."""


class BundleError(DataError):
    """A model bundle is missing, corrupted, or of an unsupported version."""


class NumericError(CrosstextError):
    """Non-finite inputs or a failed numerical routine."""

    exit_code = EXIT_NUMERIC
