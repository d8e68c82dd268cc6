"""Exception hierarchy for the design explorer."""


class ExplorerError(Exception):
    """Base class for all design explorer errors."""


class EmptyInputError(ExplorerError, ValueError):
    """An operation that needs at least one point received none."""


class DimensionMismatchError(ExplorerError, ValueError):
    """Points, boxes or trees of different dimensions were combined."""

    def __init__(self, expected: int, got: int):
        super().__init__(f"Dimension mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class InvalidPointError(ExplorerError, ValueError):
    """A point has no coordinates or a non-finite coordinate."""


class InvalidBoxError(ExplorerError, ValueError):
    """A bounding box has min > max in some dimension."""


class NonPositiveEpsilonError(ExplorerError, ValueError):
    """A hyperball radius was zero or negative."""


class UnknownPointIdError(ExplorerError, KeyError):
    """A point id is not stored in the tree or forest."""

    def __init__(self, point_id: int):
        super().__init__(point_id)
        self.point_id = point_id

    def __str__(self) -> str:
        return f"Unknown point id: {self.point_id}"


class SamePointError(ExplorerError, ValueError):
    """Two ids resolve to the same leaf."""


class DuplicateIdError(ExplorerError, ValueError):
    """A point id is already in use."""


class KTooLargeError(ExplorerError, ValueError):
    """More peripheral points were requested than the dataset holds."""


class CollisionExhaustedError(ExplorerError, RuntimeError):
    """A point could not be placed away from its neighbours within the retry budget."""


class ConfigError(ExplorerError, ValueError):
    """Invalid configuration value or file.

    Parameters
    ----------
    message : str
        Human-readable description of the problem.
    field : str | None, default=None
        Dotted name of the offending field, if known.
    line : int | None, default=None
        Line number in the configuration file, if known.
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        location = ""
        if field:
            location += f"field '{field}'"
        if line is not None:
            location += f"{' ' if location else ''}(line {line})"
        super().__init__(f"{location}: {message}" if location else message)


class MalformedInputError(ExplorerError, ValueError):
    """A sample log or other input file cannot be parsed."""
