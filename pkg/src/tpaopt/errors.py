"""Exception and warning classes raised across the toolkit."""


class TpaOptError(Exception):
    """Base class for every error raised by tpaopt."""


class ConfigError(TpaOptError):
    """Invalid user input: bad parameters, bad config files, bad paths."""


class NumericalError(TpaOptError):
    """A computation could not be carried out."""


class NonPositiveLinewidth(ConfigError):
    pass


class NegativeDipole(ConfigError):
    pass


class BadGridSpec(ConfigError):
    pass


class GridMismatch(ConfigError):
    pass


class UnsupportedMode(ConfigError):
    pass


class BadRank(ConfigError):
    pass


class UnnormalizedCoefficients(ConfigError):
    pass


class AsymmetricTimeGrid(ConfigError):
    pass


class EmptySweep(ConfigError):
    pass


class OutOfMemory(NumericalError, MemoryError):
    """Kernel would exceed the configured entry cap."""


class NumericalFailure(NumericalError):
    """The SVD backend did not converge."""


class ZeroKernel(NumericalError):
    pass


class EmptyDecomposition(NumericalError):
    pass


class OverlapWarning(UserWarning):
    """Graded-grid clusters overlap; the shared interval was split between them."""


class PerturbativeWarning(UserWarning):
    """A reported second-order probability exceeds 0.1."""
