"""Exception types shared across the package."""


class WilsonLabError(Exception):
    """Base class for every error raised by wilsonlab."""


class InvalidInput(WilsonLabError, ValueError):
    """Bad arguments; the CLI maps these to exit status 2."""


# groups
class DimensionMismatch(InvalidInput):
    pass


class OverlappingSupports(InvalidInput):
    pass


class ZeroGenerator(InvalidInput):
    pass


class NotAGroupElement(InvalidInput):
    pass


class BadModulus(InvalidInput):
    pass


# grid
class BadParameters(InvalidInput):
    pass


class TooLarge(InvalidInput):
    pass


class OffGridShift(InvalidInput):
    pass


class PeriodTooSmall(InvalidInput):
    pass


# synth / frames
class IncompatibleGrid(InvalidInput):
    pass


class WrongDimension(InvalidInput):
    pass


class NotShiftInvariant(InvalidInput):
    pass


class AlphaNotInDual(InvalidInput):
    pass


class SymmetryViolated(InvalidInput):
    pass


class SeparabilityRequired(InvalidInput):
    pass


class DegenerateFibers(WilsonLabError):
    def __init__(self, message, fibers=()):
        super().__init__(message)
        self.fibers = list(fibers)


class NotTight(WilsonLabError):
    pass


# contin
class UnknownName(InvalidInput):
    pass


class NoTimeEvaluator(InvalidInput):
    pass


class TruncationInsufficient(WilsonLabError):
    pass


# sympl
class OddDimension(InvalidInput):
    pass


class AllBlocksSingular(InvalidInput):
    pass


class IncompatiblePlan(InvalidInput):
    """A plan cannot act exactly on the requested grid."""


class IncompatibleDilation(IncompatiblePlan):
    pass


class IncompatibleChirp(IncompatiblePlan):
    pass


class IncompatibleFourier(IncompatiblePlan):
    pass


# cli
class ConfigError(InvalidInput):
    pass
