"""
Error types for gwp

Every library error is a ValueError subclass so callers that only care about
"bad input" can catch ValueError, while the CLI maps GwpError to exit code 2.
"""

from typing import Optional


class GwpError(ValueError):
    """Base class for all gwp errors"""


class ConfigError(GwpError):
    """Malformed configuration value"""


class ParseError(GwpError):
    """A file or token string does not follow its format"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlphabetError(GwpError):
    """Token outside an alphabet, mismatched alphabets, missing inverses"""


class GroupDefinitionError(GwpError):
    """Inconsistent group data (degree mismatch, inverse inconsistency)"""


class SlpError(GwpError):
    """Invalid straight-line program"""


class SlpCycleError(SlpError):
    def __init__(self, witness: str):
        self.witness = witness
        super().__init__(f"SLP is cyclic: variable {witness!r} derives itself")


class UndefinedVariableError(SlpError):
    """Missing start rule or reference to an unknown variable"""


class ExpansionLimitError(SlpError):
    def __init__(self, length: int, limit: int):
        self.length = length
        self.limit = limit
        super().__init__(f"expansion length {length} exceeds limit {limit}")


class PositionOutOfRangeError(SlpError, IndexError):
    def __init__(self, position: int, length: int):
        self.position = position
        self.length = length
        super().__init__(f"position {position} out of range for length {length}")


class RangeError(SlpError):
    """Invalid substring range"""


class SupportLimitError(GwpError):
    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(f"support size {size} exceeds limit {limit}")


class LevelBoundError(GwpError):
    """Wreath-embedding level outside the configured bound"""


class InputLengthError(GwpError):
    """Input bit string has the wrong length"""


class CircuitError(GwpError):
    """Malformed or unsuitable circuit"""


class OneHotError(CircuitError):
    def __init__(self, witness: str, hot: int):
        self.witness = witness
        self.hot = hot
        super().__init__(
            f"circuit is not one-hot: input {witness} sets {hot} outputs to 1"
        )


class NotPreprocessedError(CircuitError):
    """Input gate with fan-out other than one"""


class NotSuperDecreasingError(GwpError):
    """Sequence term does not exceed the sum of later terms"""
