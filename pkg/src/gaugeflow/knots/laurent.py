"""Exact integer Laurent polynomials with half-integer exponents.

Exponents are stored doubled (the key 2e represents q^e), so even-component
links with half-integer powers stay in integer arithmetic.
"""

from __future__ import annotations


class LaurentPolynomial:
    """Immutable Laurent polynomial with integer coefficients.

    ``terms`` maps doubled exponents to nonzero integer coefficients.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, int] | None = None):
        clean = {}
        for exp, coeff in (terms or {}).items():
            if int(exp) != exp or int(coeff) != coeff:
                raise TypeError("exponents and coefficients must be integers")
            if coeff != 0:
                clean[int(exp)] = clean.get(int(exp), 0) + int(coeff)
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPolynomial":
        return LaurentPolynomial()

    @staticmethod
    def one() -> "LaurentPolynomial":
        return LaurentPolynomial({0: 1})

    @staticmethod
    def monomial(doubled_exp: int, coeff: int = 1) -> "LaurentPolynomial":
        return LaurentPolynomial({doubled_exp: coeff})

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(out)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) - c
        return LaurentPolynomial(out)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial({e: -c for e, c in self.terms.items()})

    def __mul__(self, other) -> "LaurentPolynomial":
        if isinstance(other, int):
            return LaurentPolynomial({e: c * other for e, c in self.terms.items()})
        out: dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = e1 + e2
                out[key] = out.get(key, 0) + c1 * c2
        return LaurentPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPolynomial":
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative powers only for monomials")
            ((e, c),) = self.terms.items()
            if abs(c) != 1:
                raise ValueError("negative powers need a unit coefficient")
            return LaurentPolynomial({e * n: c if n % 2 else 1})
        out = LaurentPolynomial.one()
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- structure ----------------------------------------------------------

    def substitute_inverse(self) -> "LaurentPolynomial":
        """q -> 1/q (mirror image of the underlying knot)."""
        return LaurentPolynomial({-e: c for e, c in self.terms.items()})

    def scale_exponents(self, num: int) -> "LaurentPolynomial":
        """Map q -> q^num on doubled exponents (num may be negative)."""
        return LaurentPolynomial({e * num: c for e, c in self.terms.items()})

    def min_exponent(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return min(self.terms)

    def max_exponent(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return max(self.terms)

    def exact_div(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        """Exact division; raises ValueError on a nonzero remainder."""
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = dict(self.terms)
        lead_e = other.max_exponent()
        lead_c = other.terms[lead_e]
        out: dict[int, int] = {}
        while rem:
            e = max(rem)
            c = rem[e]
            if c % lead_c != 0:
                raise ValueError("not exactly divisible (coefficient)")
            qe, qc = e - lead_e, c // lead_c
            out[qe] = out.get(qe, 0) + qc
            for oe, oc in other.terms.items():
                key = oe + qe
                val = rem.get(key, 0) - oc * qc
                if val:
                    rem[key] = val
                else:
                    rem.pop(key, None)
        return LaurentPolynomial(out)

    # -- rendering ----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[int, int]]:
        return sorted(self.terms.items())

    def to_json_terms(self) -> list[list[int]]:
        """Sorted [doubled_exponent, coefficient] pairs (exponents in halves)."""
        return [[e, c] for e, c in self.sorted_terms()]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.sorted_terms():
            if e == 0:
                bits.append(f"{c}")
            else:
                exp = f"{e // 2}" if e % 2 == 0 else f"{e}/2"
                coeff = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                bits.append(f"{coeff}q^{exp}")
        return " + ".join(bits).replace("+ -", "- ")
