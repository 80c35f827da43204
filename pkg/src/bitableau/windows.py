"""Window search: the finite runs that witness diamond-a obligations.

A window for a set w is a sequence of saturations chained by box-b
obligations, all of them fed by box_minus(w, 'a').  Without 4(b) the search
works with windows of length degree(w)+1 extended by continuations until the
chain repeats; with 4(b) a single two-cell window whose far cell tolerates a
reflexive b-edge stands in for the whole infinite chain.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .formula import Formula, FormulaSet
from .saturation import (
    LogicId,
    box_minus,
    ccs_members,
    is_ccs,
)


class Window:
    """A run (w_0 ... w_k) for a parent set; goal is seeded into w_0 if set.

    Equality and hashing look at the cells only: all windows in one chain
    share the parent, and continuations drop the goal.
    """

    __slots__ = ("cells", "parent", "goal", "_hash")

    def __init__(self, cells: tuple[FormulaSet, ...], parent: FormulaSet,
                 goal: Formula | None = None):
        if not cells:
            raise ValueError("a window needs at least one cell")
        self.cells = cells
        self.parent = parent
        self.goal = goal
        self._hash = hash(cells)

    @property
    def k(self) -> int:
        return len(self.cells) - 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Window):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Window({list(self.cells)!r})"


def is_window(t: Window, logic: LogicId) -> bool:
    """Reference predicate for windows as produced by the searchers."""
    base = box_minus(t.parent, "a", logic)
    cells = t.cells
    k = t.k
    last = cells[k]
    if logic.four_b:
        # the far cell must tolerate its own box-b obligations (it carries a
        # reflexive b-edge in the extracted model)
        if not is_ccs(last, base | box_minus(last, "b", logic)):
            return False
    else:
        if not is_ccs(last, base):
            return False
    for i in range(k):
        feed = base | box_minus(cells[i + 1], "b", logic)
        if i == 0 and t.goal is not None:
            feed = feed.add(t.goal)
        if not is_ccs(cells[i], feed):
            return False
    if logic.four_b:
        for i in range(k + 1):
            for j in range(i, k + 1):
                if not (box_minus(cells[j], "b", logic) <= box_minus(cells[i], "b", logic)):
                    return False
    return True


def find_window(w: FormulaSet, goal: Formula, logic: LogicId) -> Iterator[Window]:
    """All candidate windows for one diamond-a obligation of w, in search order.

    Cells are built right to left.  Without 4(b) the window has degree(w)+1
    cells; with 4(b) it is a two-cell window whose far cell comes from the
    b-closed enumeration.  An empty stream means the obligation is
    unrealizable.
    """
    base = box_minus(w, "a", logic)
    if logic.four_b:
        for w1 in ccs_members(base, True):
            feed0 = (base | box_minus(w1, "b", logic)).add(goal)
            for w0 in ccs_members(feed0):
                yield Window((w0, w1), w, goal)
        return

    k = w.degree
    if k < 1:
        # a diamond obligation forces degree >= 1; guard for direct callers
        return

    def build(i: int, suffix: tuple[FormulaSet, ...]) -> Iterator[Window]:
        if i < 0:
            yield Window(suffix, w, goal)
            return
        feed = base | box_minus(suffix[0], "b", logic)
        if i == 0:
            feed = feed.add(goal)
        for cell in ccs_members(feed):
            yield from build(i - 1, (cell,) + suffix)

    for cell_k in ccs_members(base):
        yield from build(k - 1, (cell_k,))


def find_continuation(t: Window, logic: LogicId) -> Iterator[Window]:
    """Shift a window one step: same parent, same length, no goal seeding.

    Built right to left, each new cell saturating the box-b obligations of
    its right neighbour together with the old cell it replaces.  Every
    result is itself a window for the parent by the saturation composition
    properties; this is asserted rather than filtered.
    """
    if logic.four_b:
        raise ValueError(
            "continuations are undefined under transitive b: a single "
            "self-supporting two-cell window replaces the whole chain")
    base = box_minus(t.parent, "a", logic)
    k = t.k

    def build(i: int, suffix: tuple[FormulaSet, ...]) -> Iterator[Window]:
        if i < 1:
            out = Window(suffix, t.parent)
            assert is_window(out, logic), "continuation broke the window clauses"
            yield out
            return
        feed = box_minus(suffix[0], "b", logic) | t.cells[i]
        for cell in ccs_members(feed):
            yield from build(i - 1, (cell,) + suffix)

    for cell_top in ccs_members(base):
        yield from build(k, (cell_top,))


def window_sequence_loops(seen: Iterable[Window], nxt: Window) -> bool:
    """Exact repetition test that terminates continuation chains."""
    if isinstance(seen, (set, frozenset, dict)):
        return nxt in seen
    return any(nxt == t for t in seen)
