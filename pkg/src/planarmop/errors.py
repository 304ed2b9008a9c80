"""Exception types raised across the package."""


class PlanarMOPError(Exception):
    """Base class for all package errors."""


class ConfigError(PlanarMOPError, ValueError):
    pass


class EmptyConfig(ConfigError):
    pass


class ZeroNode(ConfigError):
    pass


class NonPositiveExponent(ConfigError):
    pass


class ArgumentCollision(ConfigError):
    pass


class OnBranchCut(PlanarMOPError, ValueError):
    pass


class UndefinedDirection(PlanarMOPError, ValueError):
    """Raised when arg z coincides with the argument of a node."""


class InvalidIndex(PlanarMOPError, ValueError):
    pass


class OriginNotEnclosed(PlanarMOPError):
    pass


class NoConvergence(PlanarMOPError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SingularSystem(PlanarMOPError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class SingularD(SingularSystem):
    pass


class InternalMismatch(PlanarMOPError):
    pass


class DegenerateNormalization(PlanarMOPError):
    pass


class TooCloseToContour(PlanarMOPError, ValueError):
    pass


class RankDeficientSampling(PlanarMOPError, ValueError):
    pass


class DigestMismatch(PlanarMOPError):
    pass


class CorruptFile(PlanarMOPError):
    pass


class CapExceeded(PlanarMOPError, ValueError):
    pass
