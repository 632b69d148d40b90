"""Exception types and diagnostics shared across the toolkit.

Most exceptions carry the offending terms rather than pre-rendered
strings; ``__str__`` renders them lazily so that modules below the
printer in the import graph can raise rich errors without a cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Span:
    """A position in a source file (1-based line and column)."""

    source: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.source}:{self.line}:{self.col}"


@dataclass
class Diagnostic:
    """A single finding from a validation or analysis pass.

    ``severity`` is ``"error"`` for genuine violations and ``"note"``
    for benign observations that a caller may still want to surface.
    """

    code: str
    message: str
    subject: str = ""
    severity: str = "error"
    span: Span | None = None
    data: dict[str, Any] = field(default_factory=dict)

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        subj = f" [{self.subject}]" if self.subject else ""
        return f"{where}{self.severity}: {self.code}{subj}: {self.message}"


def _show(x: Any) -> str:
    # Render terms through the pretty printer when possible; fall back to
    # repr for anything the printer does not know about.
    try:
        from . import syntax

        return syntax.render(x)
    except Exception:
        return repr(x)


class PimodError(Exception):
    """Base class for user-facing failures."""

    def __init__(self, message: str = "", **info: Any):
        super().__init__(message)
        self.message = message
        self.info = info

    def __str__(self) -> str:
        parts = [self.message] if self.message else []
        for key, val in self.info.items():
            parts.append(f"{key}={_show(val)}")
        return "; ".join(parts) if parts else self.__class__.__name__


class ParseError(PimodError):
    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.span = span

    def __str__(self) -> str:
        if self.span:
            return f"{self.span}: {self.message}"
        return self.message


class UnboundVariable(PimodError):
    pass


class UnknownConstant(PimodError):
    pass


class ArityMismatch(PimodError):
    pass


class KindHasNoType(PimodError):
    pass


class NotAProduct(PimodError):
    pass


class ConversionFailure(PimodError):
    pass


class TypeMismatch(ConversionFailure):
    """Raised when checking a term against a type it does not have.

    ``expected`` and ``actual`` are both weak-head normal.
    """

    def __init__(self, message: str, expected: Any = None, actual: Any = None, **info: Any):
        super().__init__(message, **info)
        self.expected = expected
        self.actual = actual

    def __str__(self) -> str:
        base = super().__str__()
        if self.expected is not None or self.actual is not None:
            return f"{base}: expected {_show(self.expected)}, got {_show(self.actual)}"
        return base


class FuelExhausted(PimodError):
    pass


class NotErasable(PimodError):
    pass


class NonFunctionalSpec(PimodError):
    pass


class UnknownSort(PimodError):
    pass


class TopSortHasNoType(PimodError):
    pass


class SideConditionFailed(PimodError):
    pass


class ElaborationFailed(PimodError):
    pass


class MissingBody(PimodError):
    pass


class UnrepresentableSort(PimodError):
    pass


class InternalSoundnessError(PimodError):
    """A violation of a property the toolkit guarantees by construction.

    These indicate a bug in the kernel or the encodings, never a user
    error; the CLI maps them to a distinct exit code and dumps the
    offending data for a bug report.
    """


class NotInvertible(InternalSoundnessError):
    pass


class EptsCheckFailed(InternalSoundnessError):
    pass
