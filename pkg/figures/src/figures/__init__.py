"""Regenerate the trap-analysis figure layouts from sweep CSV outputs."""

__version__ = "0.1.0"

from .render import FigureSpec, SUPPORTED_FIGURES, build_figure, render

__all__ = ["FigureSpec", "SUPPORTED_FIGURES", "build_figure", "render"]
