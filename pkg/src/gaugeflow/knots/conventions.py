"""Variable and smoothing conventions, fixed once for both Jones routes.

* Bracket variable A; loop value delta = -A^2 - A^(-2); unknot -> 1.
* Writhe correction f(K) = (-A^3)^(-w) <K>.
* Substitution to q: a bracket monomial A^e maps to q^(-e/4), i.e. the
  doubled q-exponent is -e/2 (always an integer after normalization).
* At a crossing in Morse position the smoothing that connects the lower
  legs (cap-cup) carries the A^(-1) weight when the under-strand runs along
  the lower-left/upper-right diagonal, A otherwise.  Together with the PD
  sign rule (positive when the over-strand enters counterclockwise-adjacent
  to the incoming under-strand) this makes the two Jones routes agree; all
  conventions are enforced relationally (unknot, mirror, method equality),
  not against external tables.
"""

from .laurent import LaurentPolynomial

# delta in the bracket variable A (doubled exponents: A^2 has key 4).
LOOP_VALUE = LaurentPolynomial({4: -1, -4: -1})


def writhe_factor(w: int) -> LaurentPolynomial:
    """(-A^3)^(-w) as an exact Laurent monomial."""
    return LaurentPolynomial.monomial(-6 * w, (-1) ** (w % 2))


def bracket_to_jones(bracket: LaurentPolynomial, w: int) -> LaurentPolynomial:
    """Apply the writhe correction and substitute A -> q^(-1/4).

    The corrected bracket has even doubled A-exponents, so the doubled
    q-exponent -e/2 stays integral.
    """
    corrected = writhe_factor(w) * bracket
    out = {}
    for e, c in corrected.terms.items():
        if e % 4 != 0:
            raise ValueError("corrected bracket exponent not divisible by four")
        out[-e // 4] = out.get(-e // 4, 0) + c
    return LaurentPolynomial(out)
