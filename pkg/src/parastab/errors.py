"""Exception hierarchy shared across the package."""


class ParastabError(Exception):
    """Base class for all errors raised by parastab."""


class DivergentCoupler(ParastabError, ValueError):
    """The SQUID coupler inductance diverges (flux at or near half a flux quantum)."""


class InvalidDispersiveRegime(ParastabError, ValueError):
    """The dispersive-shift inversion has a negative radicand."""


class DegenerateSteadyState(ParastabError, RuntimeError):
    """The Liouvillian null space is not one-dimensional."""


class StepSizeUnderflow(ParastabError, RuntimeError):
    """Adaptive integration could not reach the requested accuracy."""


class DimensionMismatch(ParastabError, ValueError):
    pass


class NotHermitian(ParastabError, ValueError):
    pass


class RankDeficientFit(ParastabError, ValueError):
    pass


class ConfigError(ParastabError):
    """Problem in a run configuration file.

    ``line`` is the 1-based line number the problem was detected on, or
    ``None`` when the problem is not tied to a single line.
    """

    def __init__(self, message, line=None):
        self.message = message
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class MissingSection(ConfigError):
    pass


class MissingKey(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class DuplicateKey(ConfigError):
    def __init__(self, key, first_line, second_line):
        self.key = key
        self.first_line = first_line
        super().__init__(
            f"duplicate key {key!r} (first defined on line {first_line})",
            line=second_line,
        )


class BadUnit(ConfigError):
    pass
