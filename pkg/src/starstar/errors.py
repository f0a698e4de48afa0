"""Exception types shared across the package."""


class StarStarError(Exception):
    """Base class for all package-specific errors."""

    code = "Error"


class NotFound(StarStarError):
    """A referenced id (event, object, snapshot, checkpoint, edge) does not exist."""

    code = "NotFound"


class OutOfRange(StarStarError):
    """An index argument fell outside its valid range."""

    code = "OutOfRange"


class ParseError(StarStarError):
    """Input document is not well-formed."""

    code = "ParseError"

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(StarStarError):
    """Input is well-formed but violates the expected record schema."""

    code = "SchemaError"


class DuplicateId(StarStarError):
    """An event or object id was declared more than once."""

    code = "DuplicateId"


class DanglingRef(StarStarError):
    """A reference points at an event or object that was never declared."""

    code = "DanglingRef"


class EmptyPerspective(StarStarError):
    """The chosen perspective class has no object with at least one event."""

    code = "EmptyPerspective"


class UndefinedSimilarity(StarStarError):
    """Similarity of two empty event sets is undefined; signals a caller bug."""

    code = "UndefinedSimilarity"
