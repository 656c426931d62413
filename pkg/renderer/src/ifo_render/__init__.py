"""Figure rendering for interferometer sweep outputs."""

from .plots import PlotSpec, RenderError, Table, discover, load_table, render

__version__ = "0.1.0"
