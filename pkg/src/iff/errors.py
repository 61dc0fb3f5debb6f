"""Shared diagnostics record and the exception hierarchy."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class Diagnostic:
    """One violation found by a check_* operation.

    ``kind`` names the violated rule, ``subject`` the offending identifiers,
    and ``detail`` spells out both sides of the failed condition.
    """

    kind: str
    subject: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        where = ", ".join(self.subject)
        return f"{self.kind} at ({where}): {self.detail}" if self.detail else f"{self.kind} at ({where})"


class IffError(Exception):
    """Base class for all library errors."""


class UnknownIdentifierError(IffError):
    """An instance or type name was used but never declared."""

    def __init__(self, identifier: str, context: str = ""):
        self.identifier = identifier
        self.context = context
        suffix = f" in {context}" if context else ""
        super().__init__(f"unknown identifier {identifier!r}{suffix}")


class ValidationError(IffError):
    """A structural precondition or invariant does not hold."""

    def __init__(self, message: str, diagnostics: tuple[Diagnostic, ...] = ()):
        self.diagnostics = tuple(diagnostics)
        if self.diagnostics:
            listed = "; ".join(str(d) for d in self.diagnostics)
            message = f"{message}: {listed}"
        super().__init__(message)


class SoundnessError(ValidationError):
    """A logic required to be sound has abnormal instances."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class SynonymyConflictError(ValidationError):
    """Alleged synonyms are distinguished by at least one instance."""


class CapExceededError(IffError):
    """An enumeration-bound operation was asked to exceed its cap."""

    def __init__(self, cap_name: str, cap: int, needed: int):
        self.cap_name = cap_name
        self.cap = cap
        self.needed = needed
        super().__init__(f"{cap_name} cap exceeded: {needed} types needed, cap is {cap}")


@dataclass(frozen=True)
class SourcePosition:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(IffError):
    """Syntax error; position points at the offending token."""

    def __init__(self, position: SourcePosition, expected: str, message: str):
        self.position = position
        self.expected = expected
        super().__init__(f"parse error at {position}: {message} (expected {expected})")


class ResolutionError(IffError):
    """A cross-reference failed to resolve after a clean parse."""

    def __init__(self, message: str, position: SourcePosition | None = None):
        self.position = position
        where = f" at {position}" if position else ""
        super().__init__(f"resolution error{where}: {message}")
