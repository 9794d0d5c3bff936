"""Knot-diagram ingestion and exact polynomial invariants.

Planar diagrams enter as PD codes; the Kauffman bracket state sum and the
vertex-model transfer contraction compute the Jones polynomial by two
independent routes over exact integer Laurent arithmetic.
"""

from .laurent import LaurentPolynomial
from .pdcode import PDCode, PDError, parse_pd, writhe, mirror
from .bracket import kauffman_bracket
from .vertex import vertex_model_jones, vertex_bracket, MorseConversionError
from .jones import KnotLabel, jones_polynomial, counting_function

__all__ = [
    "LaurentPolynomial",
    "PDCode",
    "PDError",
    "parse_pd",
    "writhe",
    "mirror",
    "kauffman_bracket",
    "vertex_model_jones",
    "vertex_bracket",
    "MorseConversionError",
    "KnotLabel",
    "jones_polynomial",
    "counting_function",
]
