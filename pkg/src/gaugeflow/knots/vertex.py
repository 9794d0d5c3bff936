"""Vertex-model Jones polynomial via a Morse presentation of the diagram.

The planar rotation system (the counterclockwise slot order of each PD
crossing) is swept by a height function: a backtracking frontier search
converts the diagram into a word of cup, cap and crossing events acting on
an ordered list of open strands.  Ties in the event order are broken by
stable crossing/slot indices, so the presentation is deterministic.

The word is then contracted as a transfer network: every open strand
carries a spin label, caps and cups carry the rank-two pairing weights
(+A, -1/A), and each crossing carries the two-smoothing tensor.  All
arithmetic is exact integer Laurent; the pairing's unit factors contribute
the global sign (-1)^(#cups).
"""

from __future__ import annotations

from dataclasses import dataclass

from .conventions import LOOP_VALUE
from .laurent import LaurentPolynomial
from .pdcode import PDCode, PDError

# Pairing matrix entries by (label_left, label_right); unit factor absorbed
# into the global sign.
_PAIR = {
    (0, 1): LaurentPolynomial.monomial(2, 1),  # +A
    (1, 0): LaurentPolynomial.monomial(-2, -1),  # -1/A
}

# Cap-cup smoothing weight when the under-strand runs along the
# lower-left/upper-right diagonal: +1 selects A, -1 selects 1/A.
# Pinned by the requirement that both Jones routes agree on chiral knots.
UNDER_LLUR_CAPCUP_IS_A = True


class MorseConversionError(PDError):
    """The rotation system admits no planar Morse sweep (non-planar data)."""


def _check_planarity(pd: PDCode) -> None:
    """Euler-characteristic test of the rotation system (per component)."""
    if pd.n_crossings == 0:
        return
    succ: dict[tuple[int, int], tuple[int, int]] = {}
    slots = {}
    for ci, cr in enumerate(pd.crossings):
        for pos, e in enumerate(cr):
            slots.setdefault(e, []).append((ci, pos))
    other = {}
    for e, occ in slots.items():
        other[occ[0]] = occ[1]
        other[occ[1]] = occ[0]

    # Connected components of the crossing graph.
    comp = {ci: ci for ci in range(pd.n_crossings)}

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for (ci, _), (cj, _) in other.items():
        comp[find(ci)] = find(cj)
    n_components = len({find(ci) for ci in range(pd.n_crossings)})

    darts = [(ci, pos) for ci in range(pd.n_crossings) for pos in range(4)]
    seen = set()
    faces = 0
    for start in darts:
        if start in seen:
            continue
        faces += 1
        d = start
        while True:
            seen.add(d)
            cj, pos = other[d]
            d = (cj, (pos + 1) % 4)
            if d == start:
                break
            if d in seen:
                raise MorseConversionError("rotation system is not a valid embedding")
    v = pd.n_crossings
    e = 2 * pd.n_crossings
    if v - e + faces != 1 + n_components:
        raise MorseConversionError(
            f"non-planar strand data: V-E+F = {v - e + faces}, "
            f"expected {1 + n_components}"
        )


@dataclass(frozen=True)
class _Half:
    """An open strand end: the edge it belongs to and its lower anchor."""

    edge: int
    anchor: tuple  # ("slot", ci, pos) or ("cup", token)


def _slot_map(pd: PDCode) -> dict[int, list[tuple[int, int]]]:
    out: dict[int, list[tuple[int, int]]] = {}
    for ci, cr in enumerate(pd.crossings):
        for pos, e in enumerate(cr):
            out.setdefault(e, []).append((ci, pos))
    return out


def morse_events(pd: PDCode):
    """Backtracking sweep of the rotation system into a Morse word.

    Events: ("cup", i), ("cap", i), ("cross", i, under_llur) with i the
    frontier position acted on.  Raises :class:`MorseConversionError` when
    no sweep exists.
    """
    _check_planarity(pd)
    if pd.n_crossings == 0:
        return []
    slots = _slot_map(pd)
    n = pd.n_crossings
    full_mask = (1 << n) - 1
    failed: set = set()
    token_counter = [0]

    def signature(frontier, emitted):
        sig = []
        cup_ids = {}
        for h in frontier:
            if h.anchor[0] == "cup":
                cup_ids.setdefault(h.anchor[1], len(cup_ids))
                sig.append((h.edge, "c", cup_ids[h.anchor[1]]))
            else:
                sig.append((h.edge, "s", h.anchor[1], h.anchor[2]))
        return (emitted, tuple(sig))

    def live_halves(frontier, edge):
        return [i for i, h in enumerate(frontier) if h.edge == edge]

    def apply_caps(frontier, events):
        """Greedily cap adjacent completed edges (always safe)."""
        frontier = list(frontier)
        changed = True
        while changed:
            changed = False
            for i in range(len(frontier) - 1):
                a, b = frontier[i], frontier[i + 1]
                if (
                    a.edge == b.edge
                    and a.anchor[0] == "slot"
                    and b.anchor[0] == "slot"
                    and a.anchor[1:] != b.anchor[1:]
                ):
                    events.append(("cap", i))
                    del frontier[i : i + 2]
                    changed = True
                    break
        return frontier

    def consume(frontier, idx, ci, pos):
        """Attach frontier[idx]'s top to slot (ci, pos); re-anchor a cup twin."""
        h = frontier[idx]
        if h.anchor[0] == "cup":
            token = h.anchor[1]
            for j, g in enumerate(frontier):
                if j != idx and g.anchor == ("cup", token):
                    frontier[j] = _Half(g.edge, ("slot", ci, pos))
                    break
        del frontier[idx]

    def crossing_candidates(frontier, emitted):
        """Deterministic candidate list: (sort_key, ci, k, mode, position)."""
        cands = []
        index = {}
        for i, h in enumerate(frontier):
            index.setdefault(h.edge, []).append(i)
        for ci in range(n):
            if (emitted >> ci) & 1:
                continue
            cr = pd.crossings[ci]
            for k in range(4):
                e_ll, e_lr = cr[k], cr[(k + 1) % 4]
                ll_pos = index.get(e_ll, [])
                lr_pos = index.get(e_lr, [])
                # both feet live and adjacent in order
                for i in ll_pos:
                    if i + 1 < len(frontier) and frontier[i + 1].edge == e_lr:
                        cands.append((0, ci, k, "both", i))
                # one foot live, cup in the partner
                for i in ll_pos:
                    if _edge_untouched(frontier, emitted, e_lr, ci, k, pd, slots):
                        cands.append((1, ci, k, "cup_right", i))
                for i in lr_pos:
                    if _edge_untouched(frontier, emitted, e_ll, ci, k, pd, slots):
                        cands.append((1, ci, k, "cup_left", i))
        cands.sort()
        return cands

    def _edge_untouched(frontier, emitted, edge, ci, k, pd_, slots_):
        if any(h.edge == edge for h in frontier):
            return False
        for cj, pos in slots_[edge]:
            if (emitted >> cj) & 1:
                return False
        return True

    def upper_push_legal(frontier, edge):
        halves = [h for h in frontier if h.edge == edge]
        return all(h.anchor[0] == "slot" for h in halves) and len(halves) <= 1

    def emit(frontier, events, emitted, ci, k, mode, i):
        """Apply one crossing event; returns the new frontier or None."""
        cr = pd.crossings[ci]
        frontier = list(frontier)
        if mode == "cup_right":
            e_lr = cr[(k + 1) % 4]
            tok = token_counter[0]
            token_counter[0] += 1
            events.append(("cup", i + 1))
            frontier[i + 1 : i + 1] = [
                _Half(e_lr, ("cup", tok)),
                _Half(e_lr, ("cup", tok)),
            ]
        elif mode == "cup_left":
            e_ll = cr[k]
            tok = token_counter[0]
            token_counter[0] += 1
            events.append(("cup", i))
            frontier[i:i] = [_Half(e_ll, ("cup", tok)), _Half(e_ll, ("cup", tok))]
            # the cup pair occupies (i, i+1); its right half feeds the
            # crossing beside the original live foot, now at i+2
            i = i + 1
        # Feet at (i, i+1) must match slots (k, k+1) in order.
        if frontier[i].edge != cr[k] or frontier[i + 1].edge != cr[(k + 1) % 4]:
            return None
        # Upper slots: edges cr[k+3] (upper-left), cr[k+2] (upper-right).
        e_ul, e_ur = cr[(k + 3) % 4], cr[(k + 2) % 4]
        consume(frontier, i + 1, ci, (k + 1) % 4)
        consume(frontier, i, ci, k)
        for edge, pos in ((e_ur, (k + 2) % 4), (e_ul, (k + 3) % 4)):
            if not upper_push_legal(frontier, edge):
                return None
        frontier[i:i] = [
            _Half(e_ul, ("slot", ci, (k + 3) % 4)),
            _Half(e_ur, ("slot", ci, (k + 2) % 4)),
        ]
        under_llur = k in (0, 2)
        events.append(("cross", i, under_llur))
        return frontier

    def search(frontier, emitted, events):
        frontier = apply_caps(frontier, events)
        if emitted == full_mask:
            return not frontier
        sig = signature(frontier, emitted)
        if sig in failed:
            return False
        base_len = len(events)
        for _, ci, k, mode, i in crossing_candidates(frontier, emitted):
            new_frontier = emit(frontier, events, emitted, ci, k, mode, i)
            if new_frontier is not None:
                if search(new_frontier, emitted | (1 << ci), events):
                    return True
            del events[base_len:]
        if not frontier:
            # fresh island: seed the lowest unemitted crossing, every k
            for ci in range(n):
                if (emitted >> ci) & 1:
                    continue
                cr = pd.crossings[ci]
                for k in range(4):
                    e_ll, e_lr = cr[k], cr[(k + 1) % 4]
                    tok1 = token_counter[0]
                    token_counter[0] += 1
                    events.append(("cup", 0))
                    fr = [_Half(e_ll, ("cup", tok1)), _Half(e_ll, ("cup", tok1))]
                    if e_ll == e_lr:
                        new_frontier = emit(fr, events, emitted, ci, k, "both", 0)
                    else:
                        new_frontier = emit(fr, events, emitted, ci, k, "cup_right", 0)
                    if new_frontier is not None:
                        if search(new_frontier, emitted | (1 << ci), events):
                            return True
                    del events[base_len:]
                break
        failed.add(sig)
        return False

    events: list = []
    if not search([], 0, events):
        raise MorseConversionError("no planar Morse sweep found for the diagram")
    return events


def _crossing_tensor(under_llur: bool):
    """Weights of the two smoothings in Morse position.

    Returns (x, y): x multiplies the parallel smoothing, y the cap-cup one;
    the cap-cup pairing unit factors contribute the absorbed minus sign.
    """
    a = LaurentPolynomial.monomial(2, 1)
    a_inv = LaurentPolynomial.monomial(-2, 1)
    if under_llur == UNDER_LLUR_CAPCUP_IS_A:
        return a_inv, a
    return a, a_inv


def evaluate_morse_word(events, width_limit: int = 24) -> LaurentPolynomial:
    """Contract a Morse word to the unnormalized bracket scalar."""
    states: dict[int, LaurentPolynomial] = {0: LaurentPolynomial.one()}
    width = 0
    n_cups = 0
    for event in events:
        kind = event[0]
        if kind == "cup":
            _, i = event
            n_cups += 1
            width += 1
            if width > width_limit:
                raise MorseConversionError("frontier too wide for contraction")
            new: dict[int, LaurentPolynomial] = {}
            for mask, coeff in states.items():
                lower = mask & ((1 << i) - 1)
                upper = mask >> i
                for (b1, b2), w in _PAIR.items():
                    nm = lower | (b1 << i) | (b2 << (i + 1)) | (upper << (i + 2))
                    _accum(new, nm, coeff * w)
            states = new
        elif kind == "cap":
            _, i = event
            width -= 1
            new = {}
            for mask, coeff in states.items():
                b1 = (mask >> i) & 1
                b2 = (mask >> (i + 1)) & 1
                w = _PAIR.get((b1, b2))
                if w is None:
                    continue
                lower = mask & ((1 << i) - 1)
                upper = mask >> (i + 2)
                _accum(new, lower | (upper << i), coeff * w)
            states = new
        else:
            _, i, under_llur = event
            x, y = _crossing_tensor(under_llur)
            new = {}
            for mask, coeff in states.items():
                b1 = (mask >> i) & 1
                b2 = (mask >> (i + 1)) & 1
                # parallel smoothing: labels pass through
                _accum(new, mask, coeff * x)
                # cap-cup smoothing: pair (b1, b2), then create (c1, c2)
                w_in = _PAIR.get((b1, b2))
                if w_in is None:
                    continue
                lower = mask & ((1 << i) - 1)
                upper = mask >> (i + 2)
                for (c1, c2), w_out in _PAIR.items():
                    nm = lower | (c1 << i) | (c2 << (i + 1)) | (upper << (i + 2))
                    _accum(new, nm, coeff * ((-1) * (w_in * w_out) * y))
            states = new
    scalar = states.get(0, LaurentPolynomial.zero())
    if len(states) > 1 or (states and 0 not in states):
        raise MorseConversionError("contraction left open strands")
    if n_cups % 2:
        scalar = -scalar
    return scalar


def _accum(d: dict, key: int, val: LaurentPolynomial) -> None:
    if key in d:
        d[key] = d[key] + val
    else:
        d[key] = val
    if not d[key]:
        del d[key]


def vertex_bracket(pd: PDCode) -> LaurentPolynomial:
    """Normalized bracket polynomial computed by the transfer contraction."""
    if pd.n_crossings == 0:
        if pd.unknots == 0:
            raise PDError("empty diagram")
        return LOOP_VALUE ** (pd.unknots - 1)
    events = morse_events(pd)
    raw = evaluate_morse_word(events)
    raw = raw * (LOOP_VALUE**pd.unknots)
    return raw.exact_div(LOOP_VALUE)


def vertex_model_jones(pd: PDCode, label=None) -> LaurentPolynomial:
    """Jones polynomial from the Morse-swept transfer contraction."""
    from .jones import KnotLabel, _check_label
    from .conventions import bracket_to_jones
    from .pdcode import writhe

    _check_label(label)
    return bracket_to_jones(vertex_bracket(pd), writhe(pd))
