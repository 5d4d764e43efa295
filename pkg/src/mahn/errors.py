"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Byte range inside a parsed text, plus 1-based line/column of ``begin``."""

    begin: int
    end: int
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.begin > self.end:
            raise ValueError(f"span begin {self.begin} > end {self.end}")

    @classmethod
    def at(cls, text: str, begin: int, end: int | None = None) -> "SourceSpan":
        end = begin if end is None else end
        line = text.count("\n", 0, begin) + 1
        column = begin - (text.rfind("\n", 0, begin) + 1) + 1
        return cls(begin, end, line, column)

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class MahnError(Exception):
    """Base class. ``span`` is set when the error points into parsed text."""

    def __init__(self, message: str, span: SourceSpan | None = None, ident: str | None = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.ident = ident

    def with_span(self, span: SourceSpan) -> "MahnError":
        self.span = span
        return self

    def __str__(self) -> str:
        if self.span is None:
            return self.message
        return f"line {self.span.line}, column {self.span.column}: {self.message}"


class DslSyntaxError(MahnError):
    pass


class UnknownIdentifier(MahnError):
    pass


class EmptyInitialSet(MahnError):
    pass


class ReservedIdentifier(MahnError):
    pass


class DuplicateEntry(MahnError):
    pass


class ZeroTotal(MahnError):
    pass


class CyclicCircuit(MahnError):
    pass


class UnknownPlace(MahnError):
    pass


class NotASender(MahnError):
    pass


class InvalidReceiverChoice(MahnError):
    pass


class InvalidEdge(MahnError):
    pass


class WrongConstraintClass(MahnError):
    pass


class CapExceeded(MahnError):
    pass


class MemoryCapExceeded(CapExceeded):
    pass


class NotOneSafe(MahnError):
    pass
