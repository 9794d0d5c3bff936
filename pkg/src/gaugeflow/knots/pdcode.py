"""Planar-diagram codes: parsing, strand tracing, orientation, writhe.

A crossing ``X[a,b,c,d]`` lists the four incident edge labels
counterclockwise starting from the incoming under-strand ``a`` (so the
under-strand runs a -> c).  ``U`` denotes a crossing-free unknot component.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class PDError(ValueError):
    """Malformed planar-diagram data."""


_TOKEN = re.compile(r"X\[([^\]]*)\]|U|\S+")


@dataclass(frozen=True)
class PDCode:
    """Validated planar diagram: crossings plus free unknot components."""

    crossings: tuple[tuple[int, int, int, int], ...]
    unknots: int = 0

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(map(tuple, self.crossings)))
        counts: dict[int, int] = {}
        for cr in self.crossings:
            if len(cr) != 4:
                raise PDError(f"crossing {cr} does not have four strands")
            for e in cr:
                counts[e] = counts.get(e, 0) + 1
        bad = {e: c for e, c in counts.items() if c != 2}
        if bad:
            raise PDError(f"strand labels must appear exactly twice: {bad}")
        if self.unknots < 0:
            raise PDError("negative unknot count")

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def edges(self) -> list[int]:
        return sorted({e for cr in self.crossings for e in cr})

    def slots_of(self, edge: int) -> list[tuple[int, int]]:
        """The two (crossing, position) slots where an edge terminates."""
        out = [
            (ci, pos)
            for ci, cr in enumerate(self.crossings)
            for pos, e in enumerate(cr)
            if e == edge
        ]
        return out

    def components(self) -> list[list[int]]:
        """Edge sets of the knotted components (strand tracing through
        crossings: a-c and b-d pairs continue the same strand)."""
        parent: dict[int, int] = {e: e for e in self.edges}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            parent[find(x)] = find(y)

        for a, b, c, d in self.crossings:
            union(a, c)
            union(b, d)
        groups: dict[int, list[int]] = {}
        for e in self.edges:
            groups.setdefault(find(e), []).append(e)
        return [sorted(g) for g in groups.values()]

    @property
    def n_components(self) -> int:
        return len(self.components()) + self.unknots


def parse_pd(text: str) -> PDCode:
    """Parse ``X[a,b,c,d]`` tokens and ``U`` unknot markers.

    Empty input is rejected: the 0-crossing unknot must be spelled ``U``.
    """
    crossings = []
    unknots = 0
    matched_any = False
    for m in _TOKEN.finditer(text):
        matched_any = True
        tok = m.group(0)
        if tok == "U":
            unknots += 1
            continue
        if not tok.startswith("X["):
            raise PDError(f"unrecognized token {tok!r}")
        body = m.group(1)
        try:
            labels = [int(p) for p in body.split(",")]
        except ValueError as exc:
            raise PDError(f"bad crossing entries in {tok!r}") from exc
        if len(labels) != 4:
            raise PDError(f"crossing {tok!r} needs exactly four strands")
        crossings.append(tuple(labels))
    if not matched_any:
        raise PDError("empty planar-diagram input (use 'U' for the unknot)")
    return PDCode(tuple(crossings), unknots)


def mirror(pd: PDCode) -> PDCode:
    """Mirror image: swap the over-strand entries (b, d) at every crossing."""
    return PDCode(tuple((a, d, c, b) for a, b, c, d in pd.crossings), pd.unknots)


def orient(pd: PDCode) -> dict[int, dict]:
    """Per-crossing orientation data: which over slot (1 or 3) is incoming.

    Under-strands are oriented a -> c by convention.  Over directions come
    from head/tail consistency (each edge has one tail and one head slot),
    with label succession along a component breaking pure-over ties.
    Raises :class:`PDError` on an inconsistent trace.
    """
    # role[slot] = 'head' (edge terminates into the crossing) or 'tail'.
    role: dict[tuple[int, int], str] = {}
    for ci in range(pd.n_crossings):
        role[(ci, 0)] = "head"
        role[(ci, 2)] = "tail"

    slot_pairs = {e: pd.slots_of(e) for e in pd.edges}

    changed = True
    while changed:
        changed = False
        for e, (s1, s2) in slot_pairs.items():
            r1, r2 = role.get(s1), role.get(s2)
            if r1 and r2:
                if r1 == r2:
                    raise PDError(f"inconsistent orientation trace at edge {e}")
                continue
            if r1 and not r2:
                role[s2] = "tail" if r1 == "head" else "head"
                changed = True
            elif r2 and not r1:
                role[s1] = "tail" if r2 == "head" else "head"
                changed = True
        # Over-slot pairing: within a crossing, slots 1 and 3 take opposite roles.
        for ci in range(pd.n_crossings):
            r1, r3 = role.get((ci, 1)), role.get((ci, 3))
            if r1 and r3:
                if r1 == r3:
                    raise PDError(f"inconsistent orientation trace at crossing {ci}")
            elif r1 and not r3:
                role[(ci, 3)] = "tail" if r1 == "head" else "head"
                changed = True
            elif r3 and not r1:
                role[(ci, 1)] = "tail" if r3 == "head" else "head"
                changed = True

    # Components traversed only as over-strands are untouched by the
    # propagation (two consistent choices); orient them by label succession.
    for comp in pd.components():
        comp_set = set(comp)
        lo = min(comp_set)
        for e in comp:
            succ = e + 1 if (e + 1) in comp_set else lo
            for s in slot_pairs[e]:
                if s in role:
                    continue
                ci, pos = s
                partner = (ci, {1: 3, 3: 1}[pos])
                if pd.crossings[ci][partner[1]] == succ:
                    role[s] = "head"
                    role[partner] = "tail"
    missing = [
        s
        for e in pd.edges
        for s in slot_pairs[e]
        if s not in role
    ]
    if missing:
        raise PDError(f"orientation trace undecided at slots {missing}")
    out = {}
    for ci in range(pd.n_crossings):
        over_in = 1 if role[(ci, 1)] == "head" else 3
        out[ci] = {"over_in": over_in}
    return out


def crossing_signs(pd: PDCode) -> list[int]:
    """+1 when the over-strand enters at slot d, -1 when it enters at slot b.

    The sign pairs with the smoothing convention in ``bracket``: a
    single positive kink has bracket -A^3, so the writhe correction
    cancels it exactly.
    """
    data = orient(pd)
    return [1 if data[ci]["over_in"] == 3 else -1 for ci in range(pd.n_crossings)]


def writhe(pd: PDCode) -> int:
    """Sum of crossing signs of the oriented diagram."""
    return sum(crossing_signs(pd))


def connected_sum(pd1: PDCode, pd2: PDCode) -> PDCode:
    """Splice two single-component diagrams with cyclic labels 1..m.

    The cycle of the second diagram is inserted into the closing arc of the
    first; the writhe is additive and the Jones polynomial multiplicative.
    """
    for pd in (pd1, pd2):
        if pd.unknots or len(pd.components()) != 1:
            raise PDError("connected sum needs single-component diagrams")
        edges = pd.edges
        if edges != list(range(1, len(edges) + 1)):
            raise PDError("connected sum needs consecutive labels 1..m")
    m = len(pd1.edges)
    n = len(pd2.edges)
    role1 = orient(pd1)  # validates orientability
    del role1

    def is_head(pd, ci, pos):
        # head slots: under-in (0) always; over head from orientation data
        if pos == 0:
            return True
        if pos == 2:
            return False
        return orient(pd)[ci]["over_in"] == pos

    new1 = []
    for ci, cr in enumerate(pd1.crossings):
        row = []
        for pos, e in enumerate(cr):
            if e == m and is_head(pd1, ci, pos):
                row.append(m + n)
            else:
                row.append(e)
        new1.append(tuple(row))
    new2 = []
    for ci, cr in enumerate(pd2.crossings):
        row = []
        for pos, e in enumerate(cr):
            if e == n and is_head(pd2, ci, pos):
                row.append(m)
            else:
                row.append(e + m)
        new2.append(tuple(row))
    return PDCode(tuple(new1) + tuple(new2))
