"""Exact q-expansions, CM points and high-precision zero location for
weakly holomorphic modular forms of level one and Fricke level p."""

from .errors import MfzlError
from .expr import parse_form
from .forms import delta, eisenstein, expand, fricke_eisenstein, jfunction
from .jpoly import extract_pf, integrality_report, polynomial_in_j
from .classify import classify_zero
from .locator import count_zeros_contour, find_zeros_on_arc, find_zeros_on_line
from .qseries import QSeries

__version__ = "0.1.0"

__all__ = [
    "MfzlError", "QSeries", "parse_form", "expand", "eisenstein", "delta",
    "jfunction", "fricke_eisenstein", "extract_pf", "integrality_report", "polynomial_in_j",
    "classify_zero", "find_zeros_on_arc", "find_zeros_on_line", "count_zeros_contour",
]
