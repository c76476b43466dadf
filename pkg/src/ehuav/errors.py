"""Exception hierarchy shared across the library.

The CLI maps these onto distinct exit codes (see :mod:`ehuav.cli`).
"""


class EhuavError(Exception):
    """Base class for all library errors."""


class ConfigError(EhuavError, ValueError):
    """A parameter or invariant violation in scenario/config data."""


class DomainError(EhuavError, ValueError):
    """An argument outside a function's mathematical domain."""


class NumericError(EhuavError, ArithmeticError):
    """Internal numeric inconsistency or failed convergence."""


class CapabilityError(EhuavError):
    """A request outside the guarded problem sizes (e.g. exhaustive search K > 3)."""


class TrendError(EhuavError):
    """An experiment-level trend assertion failed."""
