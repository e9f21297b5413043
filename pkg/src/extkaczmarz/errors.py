"""Exception hierarchy.

Every error carries a short ``category`` string; the CLI prints it as the
first field of its one-line failure message.
"""


class KaczmarzError(Exception):
    category = "Error"


class DimensionMismatch(KaczmarzError, ValueError):
    category = "DimensionMismatch"


class ZeroMatrix(KaczmarzError, ValueError):
    category = "ZeroMatrix"


class ZeroRow(KaczmarzError, ValueError):
    category = "ZeroRow"


class ZeroColumn(KaczmarzError, ValueError):
    category = "ZeroColumn"


class AllWeightsZero(KaczmarzError, ValueError):
    category = "AllWeightsZero"


class InvalidSpec(KaczmarzError, ValueError):
    category = "InvalidSpec"


class InconsistentImpossible(InvalidSpec):
    category = "InconsistentImpossible"


class OracleUnavailable(KaczmarzError, RuntimeError):
    category = "OracleUnavailable"


class MatrixMarketError(KaczmarzError, ValueError):
    """Malformed Matrix Market / vector input; ``lineno`` is 1-based or None."""

    category = "MatrixMarketError"

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}"
            if lineno is not None:
                where += f":{lineno}"
            where += ": "
        super().__init__(where + message)


class MalformedHeader(MatrixMarketError):
    category = "MalformedHeader"


class EntryCountMismatch(MatrixMarketError):
    category = "EntryCountMismatch"


class IndexOutOfBounds(MatrixMarketError):
    category = "IndexOutOfBounds"
