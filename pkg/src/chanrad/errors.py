"""Exception hierarchy: physics preconditions vs configuration problems."""


class ChannelingError(Exception):
    """Base class for physics-precondition failures (CLI exit code 2)."""


class NonRelativistic(ChannelingError):
    """Total energy does not exceed the rest mass."""


class EmptyChannel(ChannelingError):
    """Channel geometry (dp, U0 or crystal length) is non-positive."""


class AboveBarrier(ChannelingError):
    """Incidence angle at or beyond the channel acceptance angle."""


class EmptyWell(ChannelingError):
    """Well too shallow to bind even the ground state."""


class GridTooNarrow(ChannelingError):
    """Wavefunction tail at the grid boundary exceeds the allowed level."""


class GridMismatch(ChannelingError):
    """Operands sampled on different grids."""


class NoBoundStates(ChannelingError):
    """Eigensolver found no level below the escape threshold."""


class ConvergenceFailure(ChannelingError):
    """Tridiagonal eigen-iteration did not converge."""


class AxisEmpty(ChannelingError):
    """Spectrum axis has no points."""


class ConfigError(Exception):
    """Base class for configuration problems (CLI exit code 1)."""

    def __init__(self, key, reason=""):
        self.key = key
        self.reason = reason
        msg = f"{type(self).__name__.replace('Error', '')}: {key}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class UnknownKey(ConfigError):
    """Config contains a key that is not documented."""


class MissingKey(ConfigError):
    """A required config key is absent."""


class BadValue(ConfigError):
    """A config value cannot be parsed or violates an invariant."""


class IoFailure(Exception):
    """Output file could not be written (CLI exit code 1)."""

    def __init__(self, path, reason=""):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")
