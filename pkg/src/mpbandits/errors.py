"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid dimensions, parameters, or incompatible component pairing."""


class ProtocolViolationError(RuntimeError):
    """A strategy or channel endpoint broke the interaction protocol."""


class StateError(RuntimeError):
    """Operation invoked on incomplete or inconsistent state."""


class InvariantViolation(RuntimeError):
    """A runtime invariant that should hold by construction was falsified."""


class FilteringAssumptionError(RuntimeError):
    """The low-switching resample was called with q(i) < (1-eps_i) p(i)."""
