"""Exact symbolic workbench for Nth-order superintegrable systems separating in Cartesian coordinates."""

from . import catalog, compat, deteq, opalg, painleve, symcore
from .compat import classify, lcc, nlcc, reduce_trivial
from .deteq import IntegralAnsatz, counts, determining_system
from .painleve import painleve_test, parse_ode
from .parsing import ParseError, parse_expression
from .symcore import DPoly, to_text

__version__ = "0.1.0"

__all__ = [
    "catalog", "compat", "deteq", "opalg", "painleve", "symcore",
    "DPoly", "IntegralAnsatz", "ParseError",
    "classify", "counts", "determining_system", "lcc", "nlcc", "painleve_test",
    "parse_expression", "parse_ode", "reduce_trivial", "to_text",
]
