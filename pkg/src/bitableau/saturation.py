"""Logic identifiers, box projections and consistent classical saturations.

A consistent classical saturation (CCS) of a set u is a clash-free superset
of u inside csf(u) that is closed under conjunction splitting, makes a choice
on every negated conjunction, and eliminates double negations.  These are the
open branches of a classical tableau over u and are the branching unit of
every nondeterministic choice in the decision procedures.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .formula import (
    AND,
    BOT,
    BOXA,
    BOXB,
    NEG,
    FALSUM,
    Formula,
    FormulaSet,
    csf,
    neg,
)


@dataclass(frozen=True)
class LogicId:
    """Which axioms extend the base bimodal logic."""

    de: bool = False
    four_a: bool = False
    four_b: bool = False

    @property
    def name(self) -> str:
        base = "kde" if self.de else "kab"
        if self.four_a:
            base += "4a"
        if self.four_b:
            base += "4b"
        return base

    @property
    def experimental(self) -> bool:
        # weak density + 4(b) without 4(a) is accepted but not battle-tested
        return self.de and self.four_b and not self.four_a

    def __str__(self) -> str:
        return self.name


KAB = LogicId()
KAB4A = LogicId(four_a=True)
KAB4A4B = LogicId(four_a=True, four_b=True)
KDE = LogicId(de=True)
KDE4A = LogicId(de=True, four_a=True)
KDE4A4B = LogicId(de=True, four_a=True, four_b=True)

LOGICS: dict[str, LogicId] = {
    "kab": KAB,
    "kab4a": KAB4A,
    "kab4a4b": KAB4A4B,
    "kde": KDE,
    "kde4a": KDE4A,
    "kde4a4b": KDE4A4B,
}

ALL_LOGICS: tuple[LogicId, ...] = tuple(LOGICS.values())


def logic_by_name(name: str) -> LogicId:
    try:
        return LOGICS[name]
    except KeyError:
        raise ValueError(f"unknown logic {name!r}; expected one of {sorted(LOGICS)}") from None


# --------------------------------------------------------------------------
# Box projections
# --------------------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _box_minus(fs: FormulaSet, box_kind: str, keep_box: bool) -> FormulaSet:
    out: set[Formula] = set()
    for f in fs.fs:
        if f.kind == box_kind:
            out.add(f.left)
            if keep_box:
                out.add(f)
    return FormulaSet(out)


def box_minus(w: FormulaSet, modality: str, logic: LogicId) -> FormulaSet:
    """Obligations transferred to an a- or b-successor of w.

    Under the matching transitivity axiom the box itself travels along with
    its argument; otherwise only the argument does.
    """
    if modality == "a":
        return _box_minus(w, BOXA, logic.four_a)
    if modality == "b":
        return _box_minus(w, BOXB, logic.four_b)
    raise ValueError(f"modality must be 'a' or 'b', got {modality!r}")


# --------------------------------------------------------------------------
# CCS predicate and enumeration
# --------------------------------------------------------------------------

def is_ccs(w: FormulaSet, u: FormulaSet) -> bool:
    """Reference predicate: w is a consistent classical saturation of u."""
    if not (u.fs <= w.fs and w.fs <= csf(u).fs):
        return False
    return _clauses_hold(w)


def _clauses_hold(w: FormulaSet) -> bool:
    fs = w.fs
    if FALSUM in fs:
        return False
    for f in fs:
        if f.kind == AND:
            if f.left not in fs or f.right not in fs:
                return False
        elif f.kind == NEG:
            g = f.left
            if g in fs:
                return False
            if g.kind == AND and neg(g.left) not in fs and neg(g.right) not in fs:
                return False
            if g.kind == NEG and g.left not in fs:
                return False
    return True


def _saturate(items: set[Formula], b_closed: bool) -> frozenset[Formula] | None:
    """Apply the deterministic rules to a fixpoint; None on a clash."""
    work = list(items)
    out: set[Formula] = set()
    while work:
        f = work.pop()
        if f in out:
            continue
        if f.kind == BOT:
            return None
        out.add(f)
        if f.kind == AND:
            work.append(f.left)
            work.append(f.right)
        elif f.kind == NEG and f.left.kind == NEG:
            work.append(f.left.left)
        elif b_closed and f.kind == BOXB:
            # cells that must tolerate a reflexive b-edge absorb their own
            # box-b obligations
            work.append(f.left)
    for f in out:
        if f.kind == NEG and f.left in out:
            return None
    return frozenset(out)


def _undecided(current: frozenset[Formula], decided: frozenset[Formula]) -> Formula | None:
    best: Formula | None = None
    for f in current:
        if f.kind == NEG and f.left.kind == AND and f not in decided:
            g = f.left
            if neg(g.left) in current or neg(g.right) in current:
                # satisfied branching nodes are never re-fired: this keeps
                # saturations of saturations fixed, which the window
                # continuation machinery depends on
                continue
            if best is None or f.sort_key < best.sort_key:
                best = f
    return best


@lru_cache(maxsize=1 << 15)
def ccs_members(u: FormulaSet, b_closed: bool = False) -> tuple[FormulaSet, ...]:
    """All saturations of u reachable by tableau branching, in search order.

    Branching happens on negated conjunctions in canonical formula order;
    each one offers the left negation, the right negation, then both.  The
    empty tuple signals classical inconsistency.
    """
    start = _saturate(set(u.fs), b_closed)
    if start is None:
        return ()
    out: list[FormulaSet] = []
    seen: set[frozenset[Formula]] = set()

    def expand(current: frozenset[Formula], decided: frozenset[Formula]) -> None:
        pick = _undecided(current, decided)
        if pick is None:
            if current not in seen:
                seen.add(current)
                out.append(FormulaSet(current))
            return
        g = pick.left
        decided2 = decided | {pick}
        for extra in ((neg(g.left),), (neg(g.right),), (neg(g.left), neg(g.right))):
            nxt = _saturate(set(current) | set(extra), b_closed)
            if nxt is not None:
                expand(nxt, decided2)

    expand(start, frozenset())
    return tuple(out)


def enumerate_ccs(u: FormulaSet) -> Iterator[FormulaSet]:
    """Stream of tableau saturations of u; empty iff u is classically inconsistent."""
    return iter(ccs_members(u, False))


def enumerate_ccs_b_closed(u: FormulaSet) -> Iterator[FormulaSet]:
    """Saturations additionally closed under unfolding of positive [b] boxes.

    Every yielded w satisfies is_ccs(w, u | box_minus(w, 'b', four_b-logic)),
    which is exactly what a cell supporting a reflexive b-edge needs.
    """
    return iter(ccs_members(u, True))
