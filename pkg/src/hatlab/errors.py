"""Exception hierarchy.

Two broad families matter to callers (and to the CLI exit-code mapping):
``UsageError`` for malformed input or misuse of an interface, and
``NumericError`` for violated numeric contracts (caps, precision, poles,
unreachable truncation targets). I/O problems are plain ``OSError``.
"""


class HatLabError(Exception):
    """Base class for all package-specific errors."""


class UsageError(HatLabError):
    """Malformed input: bad scalar/spec/config text, bad arguments."""


class NumericError(HatLabError):
    """A numeric contract cannot be met (cap, precision, pole, budget)."""


class PrecisionTooSmall(NumericError):
    """Requested mantissa precision is below the supported minimum."""


class ScalarParseError(UsageError):
    """Text does not match the decimal or rational scalar grammar."""


class SpecParseError(UsageError):
    """Text does not match the function-spec grammar."""


class JetMismatch(UsageError):
    """Jet operands disagree on center, order, or precision context."""


class PoleError(NumericError):
    """Evaluation point sits on a pole of the requested function."""


class NearZeroDivision(NumericError):
    """Series division by a (near-)zero constant term."""


class ExactnessRequired(UsageError):
    """An operation needs an exact rational point but got a rounded one."""


class TruncationBudgetError(NumericError):
    """No certified tail bound reachable within the outer-term budget."""


class OrderCapError(NumericError):
    """Requested jet order exceeds the configured cap for this family."""


class InconclusiveWindow(NumericError):
    """Radius window contains only zero coefficients for a non-polynomial."""


class UnsupportedCheck(UsageError):
    """The requested identity check is not available for this spec."""
