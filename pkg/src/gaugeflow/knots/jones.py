"""Jones polynomial front end: both evaluation routes plus count assembly."""

from __future__ import annotations

from dataclasses import dataclass

from .bracket import kauffman_bracket
from .conventions import bracket_to_jones
from .laurent import LaurentPolynomial
from .pdcode import PDCode, PDError, writhe


@dataclass(frozen=True)
class KnotLabel:
    """Dual-group / representation label; only SU2-fundamental is supported."""

    dual_group: str = "SU2"
    representation: str = "fundamental"

    def __post_init__(self):
        if (self.dual_group, self.representation) != ("SU2", "fundamental"):
            raise PDError(
                f"unsupported label {self.dual_group}/{self.representation}"
            )


def _check_label(label) -> KnotLabel:
    if label is None:
        return KnotLabel()
    if not isinstance(label, KnotLabel):
        raise PDError(f"expected a KnotLabel, got {label!r}")
    return label


def jones_polynomial(
    pd: PDCode, label: KnotLabel | None = None, method: str = "bracket"
) -> LaurentPolynomial:
    """Jones polynomial in q (doubled exponents for half-integer powers).

    ``method`` selects the bracket state sum or the vertex-model transfer
    contraction; the two agree exactly on valid diagrams.
    """
    _check_label(label)
    if method == "bracket":
        return bracket_to_jones(kauffman_bracket(pd), writhe(pd))
    if method == "vertex":
        from .vertex import vertex_model_jones

        return vertex_model_jones(pd, label)
    raise PDError(f"unknown method {method!r}; use 'bracket' or 'vertex'")


def counting_function(counts: dict[int, int]) -> LaurentPolynomial:
    """Assemble externally supplied integer counts a_n into sum a_n q^n."""
    return LaurentPolynomial({2 * int(n): int(c) for n, c in counts.items()})
