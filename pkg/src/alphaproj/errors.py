"""Exception types raised across the package.

Every error derives from :class:`AlphaProjError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class AlphaProjError(ValueError):
    pass


# -- measures ---------------------------------------------------------------

class AllZeroError(AlphaProjError):
    pass


class NegativeValueError(AlphaProjError):
    pass


class LengthMismatchError(AlphaProjError):
    pass


class MassError(AlphaProjError):
    """Probability mass is too far from one to renormalize silently."""


class SpaceMismatchError(AlphaProjError):
    pass


class AlphaError(AlphaProjError):
    """Order outside (0, inf) or too close to 1."""


class ParseError(AlphaProjError):
    pass


# -- divergences ------------------------------------------------------------

class NonCountingMeasureError(AlphaProjError):
    pass


class SupportMismatchError(AlphaProjError):
    pass


class DeltaTooLargeError(AlphaProjError):
    pass


# -- geometry ---------------------------------------------------------------

class InfiniteTermError(AlphaProjError):
    pass


class InfiniteIntegralError(AlphaProjError):
    pass


# -- projection -------------------------------------------------------------

class InfeasibleError(AlphaProjError):
    pass


class AllDivergencesInfiniteError(AlphaProjError):
    pass


class SupportTooLargeError(AlphaProjError):
    pass


class NotNestedError(AlphaProjError):
    pass


# -- maxent -----------------------------------------------------------------

class AlphaOutOfRangeError(AlphaProjError):
    pass


class GridTooCoarseError(AlphaProjError):
    pass


class MomentDivergedError(AlphaProjError):
    pass


class CovarianceMismatchError(AlphaProjError):
    pass


class InfiniteDivergenceError(AlphaProjError):
    pass
