class AdiapulseError(Exception):
    pass


class NumericalError(AdiapulseError):
    """Raised when a computation cannot deliver a trustworthy number."""


class ToleranceNotMet(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class ZeroDetuning(AdiapulseError, ValueError):
    pass


class ZeroDipole(AdiapulseError, ValueError):
    pass


class EmptyTable(AdiapulseError, ValueError):
    pass
