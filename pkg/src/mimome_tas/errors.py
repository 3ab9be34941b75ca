"""Exception hierarchy shared by the library and the CLI."""


class MimomeError(Exception):
    """Base class for all errors raised by mimome_tas."""

    exit_code = 2


class DimensionError(MimomeError, ValueError):
    pass


class SelectionError(MimomeError, ValueError):
    pass


class FormatError(MimomeError, ValueError):
    pass


class ProblemError(MimomeError, ValueError):
    """Infeasible selection problem, e.g. more antennas requested than exist."""


class ConfigError(MimomeError, ValueError):
    pass


class NumericalError(MimomeError, ArithmeticError):
    exit_code = 3


class BudgetError(MimomeError, RuntimeError):
    """Exhaustive enumeration refused because it exceeds the subset cap."""

    exit_code = 4
