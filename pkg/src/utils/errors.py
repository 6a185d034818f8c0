"""
Error types for warpmatrix
Every failure a caller can act on is a WarpMatrixError carrying its CLI exit
code and HTTP status, so routes and commands map errors the same way.
"""

import logging

logger = logging.getLogger(__name__)


class WarpMatrixError(Exception):
    """Base class for all domain errors"""

    exit_code = 1
    http_status = 500

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputError(WarpMatrixError):
    """Malformed user input (codes, indices, dimensions)"""
    exit_code = 2
    http_status = 400


class ConfigError(WarpMatrixError):
    """Invalid configuration value"""
    exit_code = 2
    http_status = 500


class LimitError(WarpMatrixError):
    """A configured resource limit would be exceeded"""
    exit_code = 3
    http_status = 413


class DataError(WarpMatrixError):
    """Structurally invalid matrix or inconsistent data"""
    exit_code = 4
    http_status = 422


# Input errors

class EmptyInput(InputError):
    def __init__(self):
        super().__init__("empty Gauss code")


class BadToken(InputError):
    def __init__(self, position: int, token: str):
        super().__init__(f"bad token {token!r} at position {position}")
        self.position = position
        self.token = token


class LabelNotTwice(InputError):
    def __init__(self, label: int, count: int):
        super().__init__(f"label {label} appears {count} time(s)")
        self.label = label
        self.count = count


class MissingKind(InputError):
    def __init__(self, position: int):
        super().__init__(f"token at position {position} has no O/U prefix")
        self.position = position


class InconsistentKind(InputError):
    def __init__(self, label: int):
        super().__init__(f"both passes of crossing {label} carry the same O/U prefix")
        self.label = label


class IndexOutOfRange(InputError):
    def __init__(self, name: str, value: int, low: int, high: int):
        super().__init__(f"{name}={value} is outside {low}..{high}")
        self.name = name
        self.value = value


class BadDimension(InputError):
    def __init__(self, n: int):
        super().__init__(f"dimension must be an even integer >= 2, got {n}")
        self.n = n


class TooShort(InputError):
    def __init__(self, length: int):
        super().__init__(f"need at least 3 entries (c >= 2), got {length}")
        self.length = length


class NotSquare(InputError):
    def __init__(self, rows: int, cols: int):
        super().__init__(f"matrix is {rows}x{cols}, not square")


class UnreadableMatrix(InputError):
    """Matrix text that does not parse (bad JSON, non-integer entries)"""
    pass


# Limit errors

class TooManyCrossings(LimitError):
    def __init__(self, c: int, limit: int):
        super().__init__(f"{c} crossings exceeds the limit of {limit}")
        self.c = c
        self.limit = limit


# Data errors

class WidthMismatch(DataError):
    def __init__(self, row_index: int, width: int, expected: int):
        super().__init__(f"row {row_index} has width {width}, expected {expected}")
        self.row_index = row_index


class PairingIncomplete(DataError):
    def __init__(self, column: int):
        super().__init__(f"column {column} has no zero-sum partner")
        self.column = column


class PairingNotUnique(DataError):
    def __init__(self, column: int):
        super().__init__(f"column {column} has more than one zero-sum partner")
        self.column = column


class MalformedSource(DataError):
    pass


class RowMissing(DataError):
    def __init__(self, label: int):
        super().__init__(f"no row labeled {label}")
        self.label = label


class ConsistencyError(DataError):
    """Two computation paths that must agree did not"""
    pass


def error_response(error: Exception) -> tuple:
    """
    Build the JSON error body and status for a route.

    Domain errors are reported with their own message; anything else is
    logged with its traceback and answered with a generic message.
    """
    if isinstance(error, WarpMatrixError):
        logger.info(f"{type(error).__name__}: {error.message}")
        return {
            'success': False,
            'error': error.message,
            'error_code': type(error).__name__,
        }, error.http_status

    logger.error(f"Unexpected error: {type(error).__name__}: {error}", exc_info=True)
    return {
        'success': False,
        'error': 'An unexpected error occurred.',
        'error_code': type(error).__name__,
    }, 500
