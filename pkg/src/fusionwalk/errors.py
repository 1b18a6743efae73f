"""Exception hierarchy shared by all fusionwalk modules."""


class FusionWalkError(Exception):
    """Base class for every error raised by fusionwalk."""


class TruncationOverflow(FusionWalkError):
    """A computation needed labels outside the truncation window."""


class InvalidSpec(FusionWalkError, ValueError):
    """A family specification has parameters outside their documented range."""


class NotFinite(FusionWalkError):
    """The operation requires a finite, non-truncated ring."""


class NotConnected(FusionWalkError):
    """The fusion graph is not connected."""


class DimensionMismatch(FusionWalkError, ValueError):
    """A dimension function does not cover the labels it is evaluated on."""


class EmptyWindow(FusionWalkError):
    """No complete columns are available for a truncated operator."""


class ShapeMismatch(FusionWalkError, ValueError):
    """Block structures of two states or of a state and an algebra differ."""


class SupportViolation(FusionWalkError, ValueError):
    """Mass sits on a block pair with zero multiplicity."""


class ZeroMatrix(FusionWalkError, ValueError):
    """A multiplicity matrix has no nonzero entry."""


class ParseError(FusionWalkError):
    """An input file could not be parsed."""

    def __init__(self, message, *, path=None, line=None, field=None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


class ValidationError(FusionWalkError):
    """Parsed data violates a documented invariant."""

    def __init__(self, invariant, message=""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}" if message else invariant)
