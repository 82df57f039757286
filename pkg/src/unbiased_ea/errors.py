"""Exception types raised across the package."""


class LengthMismatch(ValueError):
    pass


class NegativeProbability(ValueError):
    pass


class SumOutOfTolerance(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class RateOutOfRange(ValueError):
    pass


class BetaOutOfRange(ValueError):
    pass


class DegenerateAllZero(ValueError):
    pass


class NonPositiveWeight(ValueError):
    pass


class EmptyWeights(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class ZeroTrials(ValueError):
    pass


class ZeroP1(ValueError):
    pass


class NonPositiveAlphaMargin(ValueError):
    pass


class TooLarge(ValueError):
    pass


class UnreachableOptimum(RuntimeError):
    """The absorbing set cannot be reached from some transient state."""


class TooFewSamples(ValueError):
    pass


class EmptySample(ValueError):
    pass


class BadInput(ValueError):
    pass


class ConfigError(ValueError):
    """Base class for experiment-document problems (CLI exit code 2)."""


class ConfigParse(ConfigError):
    pass


class SchemaViolation(ConfigError):
    pass
