"""Exception types raised by the library and mapped to CLI exit codes."""

from __future__ import annotations


class EtcError(Exception):
    """Base class for all library errors."""


class ConfigError(EtcError, ValueError):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


class InfeasibleDesignError(EtcError, ValueError):
    """The triggering threshold is at or below the feasibility limit (exit code 3)."""

    def __init__(self, message: str, min_J: float | None = None):
        super().__init__(message)
        self.min_J = min_J


class DecoderAmbiguityError(EtcError):
    """Zero or several timestamp candidates fell in the decoding window."""


class ChannelProtocolError(EtcError):
    """A packet was submitted while another one is still in flight."""


class InvariantViolation(EtcError):
    """A runtime invariant of a simulation failed (exit code 4)."""

    def __init__(self, invariant: str, index: int | None = None, detail: str = ""):
        where = f" at event {index}" if index is not None else ""
        super().__init__(f"invariant '{invariant}' violated{where}: {detail}".rstrip(": "))
        self.invariant = invariant
        self.index = index
        self.detail = detail
