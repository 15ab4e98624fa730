"""Computations with Drinfeld/Anderson T-modules over local fields:
twisted polynomials, exponentials, torsion, Hensel charts and
bounded-height point counts on analytic sets."""

__version__ = "0.1.0"

from .errors import BudgetError, TmodError, ValidationError
from .localfield import LaurentField, LocalFieldElem, PadicField, laurent, padic
from .tmodule import TModule, carlitz, new_tmodule

__all__ = [
    "BudgetError",
    "LaurentField",
    "LocalFieldElem",
    "PadicField",
    "TModule",
    "TmodError",
    "ValidationError",
    "carlitz",
    "laurent",
    "new_tmodule",
    "padic",
]
