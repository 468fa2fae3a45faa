"""Exception types raised by the library and mapped to CLI exit codes."""


class WvaError(Exception):
    """Base class for all library errors."""


class DegeneratePostselection(WvaError):
    """Postselection success probability is below the usable floor."""

    def __init__(self, p_f, p_min):
        super().__init__(f"postselection probability {p_f:.3e} is below p_min={p_min:.0e}")
        self.p_f = p_f
        self.p_min = p_min


class DivergentWeakValue(WvaError):
    """Pre- and post-selected qubit states are (numerically) orthogonal."""


class NonpositiveInformation(WvaError):
    pass


class PathMismatch(WvaError):
    """The two independent QFI evaluations disagree."""


class NonpositiveData(WvaError, ValueError):
    pass


class InsufficientPoints(WvaError, ValueError):
    pass


class ZeroDetuning(WvaError, ValueError):
    pass


class ConfigError(WvaError, ValueError):
    pass
