"""Figure generation for sweep CSV logs."""

from .io import SCHEMA, SchemaError, SweepTable, read_sweep
from .render import KINDS, PlotSpec, build_figure, render

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "PlotSpec",
    "SCHEMA",
    "SchemaError",
    "SweepTable",
    "build_figure",
    "read_sweep",
    "render",
]
