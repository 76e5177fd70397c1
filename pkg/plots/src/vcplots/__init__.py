"""Static figures from scheduler benchmark CSVs."""

__version__ = "0.1.0"

from .render import (
    EmptyInput,
    FigureSpec,
    HeaderMismatch,
    KINDS,
    RenderInfo,
    render,
)
