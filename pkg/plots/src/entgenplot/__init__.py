"""Figure rendering for latency experiment result CSVs."""

from .figures import FigureSpec, SeriesData, build_figure, load_series, render

__all__ = ["FigureSpec", "SeriesData", "build_figure", "load_series",
           "render"]
__version__ = "0.1.0"
