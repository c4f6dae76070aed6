"""Exception types shared across the package."""


class FormatError(ValueError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, reason: str, line: int | None = None):
        self.line = line
        self.reason = reason
        msg = f"line {line}: {reason}" if line is not None else reason
        super().__init__(msg)


class SpecError(ValueError):
    """A parameter object violates its own invariants."""


class DimensionMismatch(ValueError):
    """Series frame dimensions differ where they must agree."""


class EmptySeriesError(ValueError):
    """A series with zero frames where at least one is required."""


class ProtocolError(ValueError):
    """An evaluation protocol is infeasible for the given trials."""


class OverlapError(ValueError):
    """Requested synthetic events overlap or fall outside the stream."""
