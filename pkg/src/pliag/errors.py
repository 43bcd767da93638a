"""Exception hierarchy shared by every module of the package."""


class PliagError(Exception):
    """Base class for all errors raised by :mod:`pliag`."""


class DomainViolation(PliagError, ValueError):
    """A point left the interior of the kernel domain."""


class MissingModuli(PliagError):
    pass


class DegeneratePair(PliagError, ValueError):
    pass


class InvalidRadius(PliagError, ValueError):
    pass


class InvalidData(PliagError, ValueError):
    pass


class SingularInput(PliagError, ValueError):
    pass


class Uninitialized(PliagError):
    pass


class UnsupportedCombination(PliagError):
    pass


class UnsupportedKeptComponent(UnsupportedCombination):
    pass


class NonConvergence(PliagError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateBeta(PliagError, ValueError):
    pass


class BracketFailure(PliagError):
    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class DivergenceGuard(PliagError):
    pass


class IncompatibleTag(PliagError, ValueError):
    pass


class IndexOutOfTrace(PliagError, IndexError):
    pass


class UnknownSolutionSet(PliagError):
    pass


class MissingGrowth(PliagError):
    pass


class InitialDistanceTooLarge(PliagError, ValueError):
    pass


class ConditionViolated(PliagError):
    pass


class InvalidInstance(PliagError, ValueError):
    pass


class DegenerateSample(PliagError):
    pass


class ConfigError(PliagError, ValueError):
    """Malformed or inconsistent run configuration."""
