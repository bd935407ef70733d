"""Exception hierarchy shared across the package."""


class SgdkfError(Exception):
    """Base class for every error raised by this package."""


# numerics
class NumericsError(SgdkfError):
    pass


class NotSchur(NumericsError):
    pass


class NotSPD(NumericsError):
    pass


class NotSymmetric(NumericsError):
    pass


class NoConvergence(NumericsError):
    pass


class NonFiniteEvaluation(NumericsError):
    pass


# battery model
class ModelError(SgdkfError):
    pass


class NonFiniteState(ModelError):
    pass


class LogDomain(ModelError):
    pass


class SurfaceSaturation(ModelError):
    pass


# filters / supervisor
class FilterError(SgdkfError):
    pass


class SingularInnovationCovariance(FilterError):
    pass


class DegenerateA(FilterError):
    pass


class DivergenceError(FilterError):
    """Estimator left its admissible region; runs report partial results."""


class ThetaOutOfRange(DivergenceError):
    pass


class DivergenceDetected(DivergenceError):
    pass


# scenario / cli
class BadSpec(SgdkfError):
    pass


class TraceMismatch(SgdkfError):
    pass


class ConfigError(SgdkfError):
    pass
