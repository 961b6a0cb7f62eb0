"""Figure rendering for solver CSV outputs; never recomputes any number."""

from .render import PlotError, PlotJob, build_figure, render

__all__ = ["PlotError", "PlotJob", "build_figure", "render"]
