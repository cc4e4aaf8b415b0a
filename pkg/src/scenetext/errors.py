"""Exception hierarchy shared by all scenetext modules."""

from __future__ import annotations


class ScenetextError(Exception):
    """Base class for every user-facing error raised by the package."""


class SchemaError(ScenetextError):
    """A scene-graph document does not match the JSON schema."""


class ValidationError(ScenetextError):
    """A scene-graph document is well-formed but violates an invariant."""


class MissingCuboid(ScenetextError):
    pass


class ParseError(ScenetextError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UntranslatableError(ScenetextError):
    """No translation rule covers a subtree of a parse tree."""


class MatchFailure(ScenetextError):
    pass


class FormatError(ScenetextError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class RealizeError(ScenetextError):
    """Base for realization failures; ``sentence_index`` is set by paragraph assembly."""

    sentence_index: int | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        if self.sentence_index is not None:
            return f"sentence {self.sentence_index}: {msg}"
        return msg


class MissingTemplate(RealizeError):
    def __init__(self, relation: str) -> None:
        super().__init__(f"no template for relation {relation!r}")
        self.relation = relation


class ArityMismatch(RealizeError):
    def __init__(self, relation: str, expected: int, found: int) -> None:
        super().__init__(
            f"relation {relation!r} expects {expected} children, found {found}"
        )
        self.relation = relation
        self.expected = expected
        self.found = found


class NoViableObject(ScenetextError):
    pass


class InvalidN(ScenetextError, ValueError):
    pass


class EmptyCorpus(ScenetextError):
    pass
