"""Figure regeneration for h2ad experiment CSVs."""

from .figspec import (ColumnMissingError, EmptyDataError, FigureSpec,
                      load_spec_file, standard_figures)
from .render import render, render_all

__version__ = "0.1.0"

__all__ = ["ColumnMissingError", "EmptyDataError", "FigureSpec",
           "load_spec_file", "standard_figures", "render", "render_all",
           "__version__"]
