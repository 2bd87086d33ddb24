"""Exception hierarchy for catlab."""


class CatlabError(Exception):
    """Base class for all errors raised by catlab."""


class InvalidDimensionError(CatlabError, ValueError):
    pass


class ShapeError(CatlabError, ValueError):
    pass


class DomainError(CatlabError, ValueError):
    """A parameter or state violates a documented precondition."""


class TruncationError(CatlabError):
    """The Fock cutoff drops more weight than allowed."""

    def __init__(self, message: str, deficit: float):
        super().__init__(f"{message} (truncated weight {deficit:.3e})")
        self.deficit = deficit


class UndefinedStateError(CatlabError, ValueError):
    pass


class SpecError(CatlabError, ValueError):
    """Physically inconsistent state parameters."""


class NoHeraldError(CatlabError):
    """Conditioning event has (numerically) zero probability."""

    def __init__(self, message: str, probability: float = 0.0):
        super().__init__(message)
        self.probability = probability


class DegenerateModelError(CatlabError):
    """An observed bin has zero probability under the model."""


class InputError(CatlabError, ValueError):
    pass


class ParseError(CatlabError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class ValidationError(CatlabError, ValueError):
    pass
