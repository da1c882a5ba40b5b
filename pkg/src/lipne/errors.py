"""Exception hierarchy shared by every module."""

from __future__ import annotations


class LipneError(Exception):
    """Base class. ``retryable`` errors may succeed with more precision or attempts."""

    retryable = False

    def to_dict(self) -> dict:
        return {"type": type(self).__name__, "message": str(self), "retryable": self.retryable}


class StructuralError(LipneError, ValueError):
    """Mismatched variable lists, wrong arity, unknown variables."""


class DomainError(LipneError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PreconditionError(DomainError):
    """A documented precondition does not hold (e.g. non-squarefree input)."""


class ParseError(LipneError, ValueError):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(offset=self.offset, expected=list(self.expected))
        return d


class PrecisionError(LipneError):
    """Working precision was insufficient to certify a numeric decision."""

    retryable = True

    def __init__(self, message: str, required_precision: int | None = None):
        self.required_precision = required_precision
        super().__init__(message)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["required_precision"] = self.required_precision
        return d


class TruncationError(LipneError):
    """Series were truncated too early to decide; re-expand further."""

    retryable = True


class SearchExhausted(LipneError):
    retryable = True

    def __init__(self, message: str, log: list | None = None):
        self.log = list(log or [])
        super().__init__(message)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["log"] = self.log
        return d
