"""Error types shared across the specification-language modules."""

from __future__ import annotations


class SpecLangError(Exception):
    """Base class for specification-language failures."""


class ParseError(SpecLangError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = expected
        suffix = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{line}:{col}: {message}{suffix}")


class DuplicateEntityError(SpecLangError):
    pass


class EvaluationError(SpecLangError):
    pass


class UnboundVariableError(EvaluationError):
    pass


class InfiniteDomainError(EvaluationError):
    pass
