"""Exception hierarchy shared by the qec modules."""


class QecError(Exception):
    """Base class for all library errors."""


class ModulusError(QecError, ValueError):
    """Raised when an operation needs a different kind of modulus (odd prime, unit, ...)."""


class DimensionMismatchError(QecError, ValueError):
    """Raised when points of different dimension or modulus are combined."""


class GraphSizeError(QecError, ValueError):
    """Raised when an instance exceeds an indexing or enumeration budget."""


class NotMaterializedError(QecError, RuntimeError):
    """Raised when bitset adjacency is requested from an oracle-only graph."""


class NoCompatibleTripleError(QecError, RuntimeError):
    """Raised when no (u, v, w) makes the linear part of the witness system solvable."""


class NoWitnessError(QecError, RuntimeError):
    """Raised when every compatible (u, v, w) was tried without finding a witness."""


class UnsupportedFieldError(QecError, ValueError):
    """Raised when Z_p[i] is not a field (p = 1 mod 4)."""
