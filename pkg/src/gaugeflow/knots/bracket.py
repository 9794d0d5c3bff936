"""Kauffman bracket by brute-force state enumeration.

Every crossing is smoothed two ways; a state contributes
A^(#A-smoothings - #B-smoothings) * delta^(loops - 1).  The A-smoothing
joins the incoming under-strand to its counterclockwise neighbour
(slots a-b and c-d); the B-smoothing joins a-d and b-c.
"""

from __future__ import annotations

from .conventions import LOOP_VALUE
from .laurent import LaurentPolynomial
from .pdcode import PDCode, PDError

MAX_CROSSINGS = 20


def _loop_count(pd: PDCode, state: int) -> int:
    """Number of closed loops after smoothing each crossing by the state bit."""
    # Endpoints are (edge, side) pairs; smoothings join edge endpoints.
    parent: dict[int, int] = {}

    def find(x):
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        parent[find(x)] = find(y)

    # Each edge has two "ends"; crossing ci holds ends 8*ci + pos (one per
    # slot).  First glue the two occurrences of each label, then the
    # smoothing arcs.
    occurrences: dict[int, list[int]] = {}
    for ci, cr in enumerate(pd.crossings):
        for pos, e in enumerate(cr):
            occurrences.setdefault(e, []).append(8 * ci + pos)
    for ends in occurrences.values():
        union(ends[0], ends[1])
    for ci in range(pd.n_crossings):
        base = 8 * ci
        if (state >> ci) & 1:  # A-smoothing: a-b, c-d
            union(base + 0, base + 1)
            union(base + 2, base + 3)
        else:  # B-smoothing: a-d, b-c
            union(base + 0, base + 3)
            union(base + 1, base + 2)
    roots = {find(8 * ci + pos) for ci in range(pd.n_crossings) for pos in range(4)}
    return len(roots)


def kauffman_bracket(pd: PDCode) -> LaurentPolynomial:
    """Normalized bracket (unknot -> 1) in the variable A."""
    n = pd.n_crossings
    if n > MAX_CROSSINGS:
        raise PDError(f"state sum limited to {MAX_CROSSINGS} crossings, got {n}")
    if n == 0:
        loops = pd.unknots
        if loops == 0:
            raise PDError("empty diagram")
        return LOOP_VALUE ** (loops - 1)
    acc = LaurentPolynomial.zero()
    for state in range(1 << n):
        a_count = bin(state).count("1")
        exponent_doubled = 2 * (2 * a_count - n)  # A^(a - b), doubled key
        loops = _loop_count(pd, state) + pd.unknots
        acc = acc + LaurentPolynomial.monomial(exponent_doubled) * (
            LOOP_VALUE ** (loops - 1)
        )
    return acc
