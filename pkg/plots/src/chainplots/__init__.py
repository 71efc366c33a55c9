"""Static figure rendering for chaintransport CSV artifacts."""
from .errors import PlotError, SpecMismatchError, OverlayMismatchError

__version__ = "0.1.0"
__all__ = ["PlotError", "SpecMismatchError", "OverlayMismatchError", "__version__"]
