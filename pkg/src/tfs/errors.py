"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from typing import Optional


class TfsError(Exception):
    """Base class for all errors raised by :mod:`tfs`."""


class SignatureError(TfsError):
    """An ill-formed type signature (cycle, bad appropriateness, ...)."""

    def __init__(self, message: str, span=None):
        self.span = span
        if span is not None:
            message = f"{message} (line {span.line}, column {span.column})"
        super().__init__(message)


class ParseError(TfsError):
    """Syntax or identifier error in a signature or AVM source text."""

    def __init__(self, message: str, span=None):
        self.span = span
        if span is not None:
            message = f"{message} (line {span.line}, column {span.column})"
        super().__init__(message)


class ResolutionBoundError(TfsError):
    """The brute-force resolver was asked to enumerate too many labellings."""

    def __init__(self, size: int, bound: int):
        self.size: int = size
        self.bound: Optional[int] = bound
        super().__init__(f"labelling space of size {size} exceeds bound {bound}")
