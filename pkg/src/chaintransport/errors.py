"""Exception types shared across the package."""


class ChainTransportError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(ChainTransportError, ValueError):
    """Invalid physical parameters or malformed inputs."""


class DecompositionError(ChainTransportError):
    """Eigendecomposition too ill-conditioned to trust (near-defective matrix)."""


class NonDecayingModeError(ChainTransportError):
    """A mode with non-negative imaginary eigenvalue makes the transfer-time integral diverge."""


class SizeLimitError(ChainTransportError):
    """Requested dense superoperator exceeds the configured dimension cap."""


class ConsistencyError(ChainTransportError):
    """An internal cross-check failed (e.g. nonzero steady-state coefficient)."""
