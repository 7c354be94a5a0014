"""Exception types shared across the package."""


class EvddError(Exception):
    """Base class for all package errors."""


class TableFullError(EvddError):
    """A fixed-capacity table ran out of free slots.

    Raised when linear probing exhausts the configured capacity; the fix is
    to construct the store with a larger log2 size.
    """

    def __init__(self, table: str, capacity: int):
        super().__init__(
            f"{table} table full (capacity {capacity}); "
            f"increase --{table}-table-size"
        )
        self.table = table
        self.capacity = capacity


class InvalidIndexError(EvddError):
    """A value index does not refer to a written slot."""


class NonFiniteValueError(EvddError):
    """NaN or infinity reached a store boundary."""


class OrderViolationError(EvddError):
    """A node was requested with a variable not above its children."""


class DegenerateNodeError(EvddError):
    """Both edge weights of a node are zero; callers must short-circuit."""


class LengthMismatchError(EvddError):
    """A basis-state string does not match the qubit count."""


class QubitOutOfRangeError(EvddError):
    """A gate references a qubit index outside the register."""


class ArityMismatchError(EvddError):
    """A gate application has the wrong number of parameters or qubits."""


class QubitCountMismatchError(EvddError):
    """Two circuits being compared act on different qubit counts."""


class ZeroStateError(EvddError):
    """Sampling was requested from an all-zero state."""


class TooManyQubitsError(EvddError):
    """The dense reference path only supports small qubit counts."""


class ComputationCancelledError(EvddError):
    """A watchdog cancelled the running computation (timeout)."""


class ParseError(EvddError):
    """Syntax error in a QASM source file."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedFeatureError(EvddError):
    """A recognized but unsupported QASM construct was used."""


class UnknownGateError(EvddError):
    """A gate application referenced an undeclared gate."""


class UnboundIdentifierError(EvddError):
    """A parameter expression used an identifier with no binding."""
