"""Kripke models: semantics, frame checks, countermodel assembly, certification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

from .formula import AND, ATOM, BOT, BOXA, BOXB, NEG, Formula
from .saturation import LogicId

if TYPE_CHECKING:  # pragma: no cover - hints only
    from .engine import Trace

Pair = tuple[int, int]


@dataclass
class KripkeModel:
    """Finite pointed model over integer world ids.

    Treated as immutable after construction; all checks are pure.
    """

    worlds: frozenset[int]
    rel_a: frozenset[Pair]
    rel_b: frozenset[Pair]
    valuation: dict[str, frozenset[int]] = field(default_factory=dict)
    root: int = 0

    def successors(self, rel: frozenset[Pair]) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {w: [] for w in self.worlds}
        for s, t in rel:
            out[s].append(t)
        return out

    def to_json(self) -> dict:
        return {
            "worlds": sorted(self.worlds),
            "root": self.root,
            "ra": sorted([list(p) for p in self.rel_a]),
            "rb": sorted([list(p) for p in self.rel_b]),
            "val": {p: sorted(ws) for p, ws in sorted(self.valuation.items())},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "KripkeModel":
        return cls(
            worlds=frozenset(doc["worlds"]),
            rel_a=frozenset((i, j) for i, j in doc["ra"]),
            rel_b=frozenset((i, j) for i, j in doc["rb"]),
            valuation={p: frozenset(ws) for p, ws in doc.get("val", {}).items()},
            root=doc["root"],
        )


def model_check(m: KripkeModel, x: int, f: Formula) -> bool:
    """Inductive satisfaction of f at world x."""
    if x not in m.worlds:
        raise ValueError(f"unknown world id {x}")
    succ_a = m.successors(m.rel_a)
    succ_b = m.successors(m.rel_b)
    memo: dict[tuple[int, Formula], bool] = {}

    def ev(w: int, g: Formula) -> bool:
        key = (w, g)
        hit = memo.get(key)
        if hit is not None:
            return hit
        kind = g.kind
        if kind == ATOM:
            res = w in m.valuation.get(g.name, frozenset())
        elif kind == BOT:
            res = False
        elif kind == NEG:
            res = not ev(w, g.left)
        elif kind == AND:
            res = ev(w, g.left) and ev(w, g.right)
        elif kind == BOXA:
            res = all(ev(t, g.left) for t in succ_a[w])
        elif kind == BOXB:
            res = all(ev(t, g.left) for t in succ_b[w])
        else:  # pragma: no cover
            raise AssertionError(kind)
        memo[key] = res
        return res

    return ev(x, f)


def is_transitive(rel: Iterable[Pair]) -> bool:
    pairs = set(rel)
    succ: dict[int, set[int]] = {}
    for s, t in pairs:
        succ.setdefault(s, set()).add(t)
    for s, t in pairs:
        for u in succ.get(t, ()):
            if (s, u) not in pairs:
                return False
    return True


def is_weakly_dense(m: KripkeModel) -> bool:
    """Every a-edge (s,t) must factor as s -a-> u -b-> t for some u."""
    succ_a = m.successors(m.rel_a)
    for s, t in m.rel_a:
        if not any((u, t) in m.rel_b for u in succ_a[s]):
            return False
    return True


def frame_satisfies_logic(m: KripkeModel, logic: LogicId) -> bool:
    if logic.de and not is_weakly_dense(m):
        return False
    if logic.four_a and not is_transitive(m.rel_a):
        return False
    if logic.four_b and not is_transitive(m.rel_b):
        return False
    return True


def transitive_closure(rel: Iterable[Pair]) -> frozenset[Pair]:
    pairs = set(rel)
    succ: dict[int, set[int]] = {}
    for s, t in pairs:
        succ.setdefault(s, set()).add(t)
    changed = True
    while changed:
        changed = False
        for s in list(succ):
            reach = succ[s]
            extra: set[int] = set()
            for t in list(reach):
                extra |= succ.get(t, set()) - reach
            if extra:
                reach |= extra
                changed = True
    return frozenset((s, t) for s, ts in succ.items() for t in ts)


def certify(m: KripkeModel, f: Formula, logic: LogicId) -> bool:
    """Frame conditions plus truth of f at the root: the executable certificate."""
    return frame_satisfies_logic(m, logic) and model_check(m, m.root, f)


# --------------------------------------------------------------------------
# Countermodel assembly from an engine trace
# --------------------------------------------------------------------------

def build_countermodel(trace: "Trace", logic: LogicId) -> KripkeModel:
    """Turn the successful branch of a decision run into a finite model.

    Worlds are node occurrences; direct edges come straight from the trace,
    and context-loop events resolve to backward edges onto the matched
    earlier occurrence (for diamond-a loops: onto every cell of the earlier
    obligation's window chain).  Transitive relations are closed at the end;
    atoms are true exactly at the occurrences that contain them.
    """
    from .engine import AEdge, BEdge, ContextLoop, NodeEntered  # local to avoid a cycle

    worlds: set[int] = set()
    cells: dict[int, "object"] = {}
    ra: set[Pair] = set()
    rb: set[Pair] = set()
    for ev in trace.events:
        if isinstance(ev, NodeEntered):
            worlds.add(ev.node)
            cells[ev.node] = ev.cell
        elif isinstance(ev, AEdge):
            ra.add((ev.src, ev.dst))
        elif isinstance(ev, BEdge):
            rb.add((ev.src, ev.dst))
        elif isinstance(ev, ContextLoop):
            entry = ev.entry
            if ev.kind == "b":
                if entry.node is None:
                    raise ValueError("malformed trace: b-loop onto a chain entry")
                rb.add((ev.src, entry.node))
            elif entry.chain_nodes:
                # diamond-a loop in a density logic: point at the whole chain
                # of the earlier obligation so the new edges stay dense
                for node in entry.chain_nodes:
                    ra.add((ev.src, node))
            elif entry.node is not None:
                ra.add((ev.src, entry.node))
            else:
                raise ValueError("malformed trace: a-loop onto an unresolved entry")
    for s, t in ra | rb:
        if s not in worlds or t not in worlds:
            raise ValueError(f"malformed trace: edge ({s},{t}) references unknown node")

    rel_a = transitive_closure(ra) if logic.four_a else frozenset(ra)
    rel_b = transitive_closure(rb) if logic.four_b else frozenset(rb)

    valuation: dict[str, set[int]] = {}
    for node, cell in cells.items():
        for f in cell:  # type: ignore[attr-defined]
            if f.kind == ATOM:
                valuation.setdefault(f.name, set()).add(node)

    return KripkeModel(
        worlds=frozenset(worlds),
        rel_a=rel_a,
        rel_b=rel_b,
        valuation={p: frozenset(ws) for p, ws in valuation.items()},
        root=trace.root_id,
    )


def restrict_to_reachable(m: KripkeModel) -> KripkeModel:
    """Submodel generated by the root; used by oracle cross-checks."""
    reach = {m.root}
    frontier = [m.root]
    succ_a = m.successors(m.rel_a)
    succ_b = m.successors(m.rel_b)
    while frontier:
        w = frontier.pop()
        for t in succ_a[w] + succ_b[w]:
            if t not in reach:
                reach.add(t)
                frontier.append(t)
    return KripkeModel(
        worlds=frozenset(reach),
        rel_a=frozenset(p for p in m.rel_a if p[0] in reach and p[1] in reach),
        rel_b=frozenset(p for p in m.rel_b if p[0] in reach and p[1] in reach),
        valuation={p: frozenset(ws & reach) for p, ws in m.valuation.items() if ws & reach},
        root=m.root,
    )
