"""Exception hierarchy shared across the package."""


class MirlabError(Exception):
    """Base class for all mirlab errors."""


class ShapeError(MirlabError):
    """Operand shapes are incompatible for the requested operation."""


class ContractError(MirlabError):
    """A documented precondition of an operation was violated."""


class ValidationError(MirlabError):
    """Input values fail a semantic check (e.g. non-stochastic rows)."""


class FormatError(MirlabError):
    """A serialized file is malformed; carries the byte offset when known."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class PlacementError(MirlabError):
    """Object placement could not be satisfied after rejection sampling."""


class TrainingDivergedError(MirlabError):
    """Training hit NaN; carries the name of the offending parameter."""
