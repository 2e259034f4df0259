"""Figure rendering for rainbowlab experiment reports."""

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, build_figure, render

__version__ = "0.1.0"
