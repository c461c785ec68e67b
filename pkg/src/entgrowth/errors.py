"""Exception hierarchy shared by all modules."""


class EntireGrowthError(Exception):
    """Base class for library errors."""


class OverflowDomain(EntireGrowthError, ArithmeticError):
    """A root/power left the hardware float range; stay in log space."""


class UnknownId(EntireGrowthError, KeyError):
    pass


class BadParam(EntireGrowthError, ValueError):
    pass


class NotProper(EntireGrowthError, ValueError):
    """The index sequence covers a cofinite set, so it has no complement."""


class EmptyWindow(EntireGrowthError, ValueError):
    pass


class DegenerateFit(EntireGrowthError, ValueError):
    pass


class RhoOutOfRange(EntireGrowthError, ValueError):
    pass


class GridTooSmall(EntireGrowthError, ValueError):
    pass


class NotInAsymptoticRegime(EntireGrowthError, ValueError):
    pass


class DomainError(EntireGrowthError, ValueError):
    pass


class NotCertified(EntireGrowthError, ArithmeticError):
    """A recentering sum hit max_terms before its tail certificate held."""


class ZeroAmbiguous(EntireGrowthError, ArithmeticError):
    """The certified error interval of a computed value contains zero."""


class AllSkipped(EntireGrowthError, ValueError):
    """Every term of a subsequence window was excluded or carried no information."""


class NotSubexponential(EntireGrowthError, ValueError):
    pass


class ConfigError(EntireGrowthError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
