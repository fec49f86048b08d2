"""Exporters: UPPAAL XTA, Graphviz DOT and BDI plan sketches."""

from .bdi import PlanLine, PlanSketch, to_bdi_sketch
from .dot import to_dot
from .xta import MODES, XtaExportError, to_xta
from .xta_check import XtaSummary, XtaSyntaxError, check_xta

__all__ = [
    "MODES", "PlanLine", "PlanSketch", "XtaExportError", "XtaSummary", "XtaSyntaxError",
    "check_xta", "to_bdi_sketch", "to_dot", "to_xta",
]
