"""Exception types raised across the toolkit.

Everything derives from :class:`SurrokitError` so callers can catch the
whole family with one clause; the concrete classes exist because tests
and CLI exit-code mapping need to tell failure modes apart.
"""


class SurrokitError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(SurrokitError, ValueError):
    """Vector or matrix does not match the expected dimensionality."""


class OutOfBounds(SurrokitError, ValueError):
    """A native-units value lies outside its parameter bounds."""

    def __init__(self, dim, value, message=None):
        self.dim = dim
        self.value = value
        super().__init__(message or f"dimension {dim}: value {value!r} outside bounds")


class OutOfUnitCube(SurrokitError, ValueError):
    """A normalized coordinate lies outside [0, 1]."""


class ZeroSamples(SurrokitError, ValueError):
    """A sample request asked for zero (or negative) points."""


class TooFewPoints(SurrokitError, ValueError):
    """Not enough data points for the requested operation."""


class SingularSystem(SurrokitError, ArithmeticError):
    """The kriging system could not be solved (near-duplicate points)."""


class NonFiniteLoss(SurrokitError, ArithmeticError):
    """Training diverged to a non-finite loss."""


class TooFewSamples(SurrokitError, ValueError):
    """Fewer training samples than the identifiability floor allows."""


class LengthMismatch(SurrokitError, ValueError):
    """Paired vectors have different lengths."""


class EmptyVectors(SurrokitError, ValueError):
    """An operation received empty input vectors."""


class EmptyValues(SurrokitError, ValueError):
    """Histogram input was empty."""


class MissingResponses(SurrokitError, KeyError):
    """A sample set lacks the requested response column."""


class MissingFoM(SurrokitError, KeyError):
    """A report lacks the requested figure of merit."""


class OutOfBoundsNominal(SurrokitError, ValueError):
    """Monte Carlo nominal point lies outside the parameter space."""


class SimulatorFailure(SurrokitError, RuntimeError):
    """The simulator returned a non-finite or missing value."""

    def __init__(self, row, x, message=None):
        self.row = row
        self.x = x
        super().__init__(
            message or f"simulator failed at row {row}, input {list(x)!r}"
        )


class MalformedCSV(SurrokitError, ValueError):
    """A CSV sample file violates the expected layout."""

    def __init__(self, line, message=None):
        self.line = line
        super().__init__(message or f"malformed CSV at line {line}")


class UnknownColumn(SurrokitError, ValueError):
    """A CSV header column matches neither a parameter nor a known response."""


class NonNumericCell(SurrokitError, ValueError):
    """A CSV data cell could not be parsed as a number."""

    def __init__(self, line, col, message=None):
        self.line = line
        self.col = col
        super().__init__(message or f"non-numeric cell at line {line}, column {col!r}")


class FormatVersionError(SurrokitError, ValueError):
    """A serialized file declares an unsupported format version."""


def check_format_version(payload: dict, supported: str = "1") -> None:
    """Reject payloads that declare a format version we do not read."""
    version = payload.get("format_version")
    if version is not None and str(version) != supported:
        raise FormatVersionError(
            f"unsupported format_version {version!r} (this build reads {supported!r})"
        )
