"""Exception hierarchy shared by all swapqkd modules."""


class SwapQkdError(Exception):
    """Base class for every error raised by this package."""


class InvalidParticleSet(SwapQkdError):
    """Duplicate or overlapping particle identifiers."""


class ParticleNotFound(SwapQkdError):
    """A referenced particle is not part of the cluster or was already consumed."""


class InvalidState(SwapQkdError):
    """An amplitude vector violates a structural invariant (length, norm, dims)."""


class ConfigError(SwapQkdError):
    """A session or experiment configuration violates its invariants."""


class ProtocolViolation(SwapQkdError):
    """A classical message does not match the expected wire format."""


class InsufficientKeyMaterial(SwapQkdError):
    """The shared ID (or the fresh key) is too short for the requested operation."""


class KeyReuseViolation(SwapQkdError):
    """An attempt to use one-time-pad key bits more than once."""


class EmptyKey(SwapQkdError):
    """Key extraction was requested but no unmeasured pair remains."""
