class PlotError(Exception):
    """Base class for rendering failures."""


class SpecMismatchError(PlotError):
    """The CSV was produced by a different experiment than the recipe expects."""


class OverlayMismatchError(PlotError):
    """Locally recomputed overlay values disagree with the CSV header."""
