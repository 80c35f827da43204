"""Backtracking decision procedures for the six bimodal logics.

Two engines share one context-stack discipline:

* For logics without weak density, a context-stack search expands each
  diamond obligation into a fresh saturation, skipping obligations whose
  (heir kind, transferred set, goal) context already sits on the stack.
* For logics with weak density, diamond-b obligations work the same way
  while diamond-a obligations are discharged through window chains; the
  chains terminate by exact window repetition (or an explicit fuel counter)
  and their cells carry their own stack contexts.

Every nondeterministic choice in the underlying procedures becomes a
depth-first search over canonically ordered streams, so runs are
reproducible.  A trace of the successful branch feeds countermodel
extraction.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .formula import BOXA, BOXB, NEG, Formula, FormulaSet, neg
from .kripke import KripkeModel, build_countermodel, certify
from .saturation import LogicId, box_minus, ccs_members
from .windows import Window, find_continuation, find_window, window_sequence_loops

DEFAULT_NODE_BUDGET = 10_000_000

# stack entry kinds: obligation heirs "a"/"b", window-cell contexts "w"
KIND_A = "a"
KIND_B = "b"
KIND_CELL = "w"


class EngineError(RuntimeError):
    """Internal invariant failure (not an unsat verdict)."""


class BudgetExceededError(EngineError):
    """The node or time budget ran out before a verdict was reached."""


class Context(NamedTuple):
    kind: str
    context_set: FormulaSet
    goal: Formula


@dataclass
class _Entry:
    ctx: Context
    node: int | None
    chain_nodes: list[int] = field(default_factory=list)


class ContextStack:
    """The global stack of contexts along the current search branch."""

    __slots__ = ("entries", "max_depth")

    def __init__(self) -> None:
        self.entries: list[_Entry] = []
        self.max_depth = 0

    def __len__(self) -> int:
        return len(self.entries)

    def push(self, ctx: Context, node: int | None) -> _Entry:
        entry = _Entry(ctx, node)
        self.entries.append(entry)
        if len(self.entries) > self.max_depth:
            self.max_depth = len(self.entries)
        return entry

    def pop(self) -> None:
        self.entries.pop()

    def find(self, ctx: Context) -> _Entry | None:
        # the push filter keeps contexts unique on the stack
        for entry in self.entries:
            if entry.ctx == ctx:
                return entry
        return None


# --------------------------------------------------------------------------
# Trace events
# --------------------------------------------------------------------------

@dataclass
class NodeEntered:
    node: int
    cell: FormulaSet


@dataclass
class AEdge:
    src: int
    dst: int


@dataclass
class BEdge:
    src: int
    dst: int


@dataclass
class WindowChain:
    parent_node: int
    cell_nodes: tuple[int, ...]
    loop_to: int | None


@dataclass
class ContextLoop:
    src: int
    kind: str
    entry: _Entry


class Trace:
    """Append-only event log of the successful branch.

    During search, failed branches are truncated away via mark/rollback, so
    the log handed to the model builder describes exactly one run.
    """

    __slots__ = ("events", "root_id", "_next")

    def __init__(self) -> None:
        self.events: list[object] = []
        self.root_id = 0
        self._next = 0

    def add_node(self, cell: FormulaSet) -> int:
        node = self._next
        self._next += 1
        self.events.append(NodeEntered(node, cell))
        return node

    def a_edge(self, src: int, dst: int) -> None:
        self.events.append(AEdge(src, dst))

    def b_edge(self, src: int, dst: int) -> None:
        self.events.append(BEdge(src, dst))

    def context_loop(self, src: int, kind: str, entry: _Entry) -> None:
        self.events.append(ContextLoop(src, kind, entry))

    def window_chain(self, parent_node: int, cells: tuple[int, ...], loop_to: int | None) -> None:
        self.events.append(WindowChain(parent_node, cells, loop_to))

    def mark(self) -> int:
        return len(self.events)

    def rollback(self, mark: int) -> None:
        del self.events[mark:]


# --------------------------------------------------------------------------
# Results
# --------------------------------------------------------------------------

@dataclass
class Stats:
    nodes_visited: int = 0
    ccs_enumerated: int = 0
    max_stack_depth: int = 0
    max_window_chain: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "nodes_visited": self.nodes_visited,
            "ccs_enumerated": self.ccs_enumerated,
            "max_stack_depth": self.max_stack_depth,
            "max_window_chain": self.max_window_chain,
        }


@dataclass
class Diagnostics:
    """Degree and loop observables for trace-level checks; not part of stats."""

    # (prev2 kind, prev kind, new kind, d(prev2 set), d(new set), new set nonempty)
    heir_triples: list[tuple[str, str, str, int, int, bool]] = field(default_factory=list)
    context_loops: int = 0
    window_loops: int = 0
    fuel_chains_completed: int = 0
    fuel_chains_with_repeat: int = 0

    def alternation_violations(self) -> list[tuple[str, str, str, int, int, bool]]:
        """Triples of nested heirs whose modality switch fails the degree drop."""
        out = []
        for trip in self.heir_triples:
            _, _, _, d_prev2, d_new, nonempty = trip
            if nonempty and not d_new < d_prev2:
                out.append(trip)
        return out


@dataclass
class SatResult:
    satisfiable: bool
    model: KripkeModel | None
    stats: Stats
    diagnostics: Diagnostics
    trace: Trace | None = None  # successful branch only; None on unsat


# --------------------------------------------------------------------------
# The prover
# --------------------------------------------------------------------------

def _diamonds(w: FormulaSet, box_kind: str) -> list[Formula]:
    return [g for g in w if g.kind == NEG and g.left.kind == box_kind]


class _Prover:
    def __init__(self, logic: LogicId, budget_nodes: int, fuel: int | None,
                 literal_loop_rule: bool, time_limit: float | None):
        self.logic = logic
        self.budget_nodes = budget_nodes
        self.fuel = fuel
        self.literal = literal_loop_rule
        self.deadline = None if time_limit is None else time.monotonic() + time_limit
        self.sigma = ContextStack()
        self.trace = Trace()
        self.stats = Stats()
        self.diag = Diagnostics()

    # -- bookkeeping ------------------------------------------------------

    def _visit(self) -> None:
        self.stats.nodes_visited += 1
        if self.stats.nodes_visited > self.budget_nodes:
            raise BudgetExceededError(
                f"node budget of {self.budget_nodes} exhausted")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceededError("time budget exhausted")

    def _ccs(self, base: FormulaSet) -> Iterator[FormulaSet]:
        for cand in ccs_members(base):
            self.stats.ccs_enumerated += 1
            yield cand

    def _count_window(self, t: Window) -> Window:
        self.stats.ccs_enumerated += len(t.cells)
        return t

    def _push(self, ctx: Context, node: int | None) -> _Entry:
        if ctx.kind in (KIND_A, KIND_B):
            heirs = [e for e in self.sigma.entries if e.ctx.kind in (KIND_A, KIND_B)]
            if len(heirs) >= 2 and heirs[-1].ctx.kind != ctx.kind:
                prev2, prev = heirs[-2], heirs[-1]
                self.diag.heir_triples.append((
                    prev2.ctx.kind, prev.ctx.kind, ctx.kind,
                    prev2.ctx.context_set.degree, ctx.context_set.degree,
                    bool(ctx.context_set),
                ))
        entry = self.sigma.push(ctx, node)
        self.stats.max_stack_depth = max(self.stats.max_stack_depth, len(self.sigma))
        return entry

    # -- K engine (no weak density) ---------------------------------------

    def sat_kab(self, w: FormulaSet, node: int) -> bool:
        self._visit()
        for modality, kind in (("a", KIND_A), ("b", KIND_B)):
            box_kind = BOXA if modality == "a" else BOXB
            for g in _diamonds(w, box_kind):
                goal = neg(g.left.left)
                u = box_minus(w, modality, self.logic)
                ctx = Context(kind, u, goal)
                hit = self.sigma.find(ctx)
                if hit is not None:
                    if self.literal:
                        return False
                    self.diag.context_loops += 1
                    self.trace.context_loop(node, kind, hit)
                    continue
                if not self._expand_kab(node, ctx, u.add(goal)):
                    return False
        return True

    def _expand_kab(self, node: int, ctx: Context, base: FormulaSet) -> bool:
        for w2 in self._ccs(base):
            mark = self.trace.mark()
            n2 = self.trace.add_node(w2)
            if ctx.kind == KIND_A:
                self.trace.a_edge(node, n2)
            else:
                self.trace.b_edge(node, n2)
            self._push(ctx, n2)
            try:
                ok = self.sat_kab(w2, n2)
            finally:
                self.sigma.pop()
            if ok:
                return True
            self.trace.rollback(mark)
        return False

    # -- De engine (weak density) ------------------------------------------

    def sat_kde(self, w: FormulaSet, node: int) -> bool:
        self._visit()
        for g in _diamonds(w, BOXB):
            goal = neg(g.left.left)
            u = box_minus(w, "b", self.logic)
            ctx = Context(KIND_B, u, goal)
            hit = self.sigma.find(ctx)
            if hit is not None:
                if self.literal:
                    return False
                self.diag.context_loops += 1
                self.trace.context_loop(node, KIND_B, hit)
                continue
            if not self._expand_b(node, ctx, u.add(goal)):
                return False
        for g in _diamonds(w, BOXA):
            goal = neg(g.left.left)
            ctx0 = Context(KIND_A, box_minus(w, "a", self.logic), goal)
            hit = self.sigma.find(ctx0)
            if hit is not None:
                if self.literal:
                    return False
                self.diag.context_loops += 1
                self.trace.context_loop(node, KIND_A, hit)
                continue
            entry0 = self._push(ctx0, None)
            try:
                ok = self._window_obligation(w, node, goal, entry0)
            finally:
                self.sigma.pop()
            if not ok:
                return False
        return True

    def _expand_b(self, node: int, ctx: Context, base: FormulaSet) -> bool:
        for w2 in self._ccs(base):
            mark = self.trace.mark()
            n2 = self.trace.add_node(w2)
            self.trace.b_edge(node, n2)
            self._push(ctx, n2)
            try:
                ok = self.sat_kde(w2, n2)
            finally:
                self.sigma.pop()
            if ok:
                return True
            self.trace.rollback(mark)
        return False

    def _window_obligation(self, w: FormulaSet, node: int, goal: Formula,
                           entry0: _Entry) -> bool:
        for t0 in find_window(w, goal, self.logic):
            self._count_window(t0)
            mark = self.trace.mark()
            entry0.chain_nodes.clear()
            if self.logic.four_b:
                ok = self._two_window(t0, node, entry0)
                if ok:
                    self.trace.window_chain(node, tuple(entry0.chain_nodes), 1)
            elif self.fuel is not None:
                chain: list[tuple[Window, int, int]] = []
                ok = self._chain_fuel(t0, w, node, goal, entry0, chain, None, self.fuel)
            else:
                chain = []
                ok = self._chain(t0, w, node, goal, entry0, chain, None)
            if ok:
                return True
            self.trace.rollback(mark)
        return False

    def _two_window(self, t: Window, parent_node: int, entry0: _Entry) -> bool:
        w0, w1 = t.cells
        n0 = self.trace.add_node(w0)
        n1 = self.trace.add_node(w1)
        self.trace.a_edge(parent_node, n0)
        self.trace.a_edge(parent_node, n1)
        self.trace.b_edge(n1, n0)
        self.trace.b_edge(n1, n1)
        entry0.chain_nodes[:] = [n0, n1]
        # the obligation context is already on the stack; the two cells are
        # checked under it, mirroring the transitive-b variant of the search
        return self.sat_kde(w0, n0) and self.sat_kde(w1, n1)

    def _chain_cell(self, t: Window, parent: FormulaSet, parent_node: int,
                    goal: Formula, prev_node: int | None) -> tuple[bool, int | None]:
        """Materialize (or reuse) and verify the leading cell of a chain window."""
        cell = t.cells[0]
        ctx = Context(
            KIND_CELL,
            box_minus(parent, "a", self.logic) | box_minus(t.cells[1], "b", self.logic),
            goal,
        )
        hit = self.sigma.find(ctx)
        if hit is not None:
            if self.literal:
                return False, None
            # same context, so the earlier cell realizes this one: reuse its
            # world instead of materializing a twin
            self.diag.context_loops += 1
            cell_node = hit.node
            assert cell_node is not None
            self.trace.a_edge(parent_node, cell_node)
            if prev_node is not None:
                self.trace.b_edge(cell_node, prev_node)
            return True, cell_node
        cell_node = self.trace.add_node(cell)
        self.trace.a_edge(parent_node, cell_node)
        if prev_node is not None:
            self.trace.b_edge(cell_node, prev_node)
        self._push(ctx, cell_node)
        try:
            ok = self.sat_kde(cell, cell_node)
        finally:
            self.sigma.pop()
        return ok, cell_node

    def _chain(self, t: Window, parent: FormulaSet, parent_node: int, goal: Formula,
               entry0: _Entry, chain: list[tuple[Window, int, int]],
               prev_node: int | None) -> bool:
        step_mark = self.trace.mark()
        ok, cell_node = self._chain_cell(t, parent, parent_node, goal, prev_node)
        if not ok:
            return False
        assert cell_node is not None
        chain.append((t, cell_node, step_mark))
        entry0.chain_nodes.append(cell_node)
        self.stats.max_window_chain = max(self.stats.max_window_chain, len(chain))
        for t2 in find_continuation(t, self.logic):
            self._count_window(t2)
            if window_sequence_loops([win for win, _, _ in chain], t2):
                idx = next(i for i, (win, _, _) in enumerate(chain) if win == t2)
                # the next cell coincides with cell idx: wrap the b-chain
                self.trace.b_edge(chain[idx][1], cell_node)
                self.diag.window_loops += 1
                self.trace.window_chain(parent_node, tuple(n for _, n, _ in chain), idx)
                return True
            mark = self.trace.mark()
            keep = len(chain)
            if self._chain(t2, parent, parent_node, goal, entry0, chain, cell_node):
                return True
            self.trace.rollback(mark)
            del chain[keep:]
            del entry0.chain_nodes[keep:]
        return False

    def _chain_fuel(self, t: Window | None, parent: FormulaSet, parent_node: int,
                    goal: Formula, entry0: _Entry, chain: list[tuple[Window, int, int]],
                    prev_node: int | None, n: int) -> bool:
        # countdown semantics: reaching zero fuel counts as success, even for
        # the no-continuation sentinel (t is None)
        if n == 0:
            self.diag.fuel_chains_completed += 1
            return self._finish_fuel_chain(entry0, parent_node, chain)
        if t is None:
            return False
        step_mark = self.trace.mark()
        ok, cell_node = self._chain_cell(t, parent, parent_node, goal, prev_node)
        if not ok:
            return False
        assert cell_node is not None
        chain.append((t, cell_node, step_mark))
        entry0.chain_nodes.append(cell_node)
        self.stats.max_window_chain = max(self.stats.max_window_chain, len(chain))
        found_any = False
        for t2 in find_continuation(t, self.logic):
            self._count_window(t2)
            found_any = True
            mark = self.trace.mark()
            keep = len(chain)
            if self._chain_fuel(t2, parent, parent_node, goal, entry0, chain, cell_node, n - 1):
                return True
            self.trace.rollback(mark)
            del chain[keep:]
            del entry0.chain_nodes[keep:]
        if not found_any:
            return self._chain_fuel(None, parent, parent_node, goal, entry0, chain,
                                    cell_node, n - 1)
        return False

    def _finish_fuel_chain(self, entry0: _Entry, parent_node: int,
                           chain: list[tuple[Window, int, int]]) -> bool:
        """Quotient a fuel-terminated chain onto its first repetition.

        Steps from the repetition onward merely replay the cycle, so their
        trace events (recorded contiguously from each step's mark) are cut
        away and the b-chain wraps back onto the repeat target.
        """
        first: dict[Window, int] = {}
        loop = None
        for j, (win, _, _) in enumerate(chain):
            if win in first:
                loop = (first[win], j)
                break
            first[win] = j
        if loop is None:
            raise EngineError(
                "fuel ran out on a window chain with no repetition; the run "
                "cannot be quotiented into a finite model (raise the fuel or "
                "use loop detection)")
        i, j = loop
        self.diag.fuel_chains_with_repeat += 1
        self.trace.rollback(chain[j][2])
        del entry0.chain_nodes[j:]
        del chain[j:]
        self.trace.b_edge(chain[i][1], chain[j - 1][1])
        self.diag.window_loops += 1
        self.trace.window_chain(parent_node, tuple(n for _, n, _ in chain), i)
        return True


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------

def decide(f: Formula, logic: LogicId, *, budget_nodes: int = DEFAULT_NODE_BUDGET,
           fuel: int | None = None, literal_loop_rule: bool = False,
           time_limit: float | None = None) -> SatResult:
    """Satisfiability of f in the given logic, with a certified model when sat.

    Raises BudgetExceededError when the node or time budget runs out; that
    outcome is distinct from an unsat verdict.
    """
    prover = _Prover(logic, budget_nodes, fuel, literal_loop_rule, time_limit)
    limit = sys.getrecursionlimit()
    bumped = limit < 20_000
    if bumped:
        sys.setrecursionlimit(20_000)
    try:
        for w in prover._ccs(FormulaSet((f,))):
            prover.trace = Trace()
            prover.sigma = ContextStack()
            root = prover.trace.add_node(w)
            prover.trace.root_id = root
            ok = prover.sat_kde(w, root) if logic.de else prover.sat_kab(w, root)
            if ok:
                model = build_countermodel(prover.trace, logic)
                if not certify(model, f, logic):
                    raise EngineError(
                        "internal error: extracted model failed certification")
                return SatResult(True, model, prover.stats, prover.diag, prover.trace)
        return SatResult(False, None, prover.stats, prover.diag)
    finally:
        if bumped:
            sys.setrecursionlimit(limit)


def valid(f: Formula, logic: LogicId, **kwargs) -> bool:
    """Validity via the dual: f is valid iff ~f has no model."""
    return not decide(neg(f), logic, **kwargs).satisfiable


def sat_kab(sigma: ContextStack, w: FormulaSet, logic: LogicId) -> bool:
    """Direct entry to the K-engine for one saturation (testing surface)."""
    prover = _Prover(logic, DEFAULT_NODE_BUDGET, None, False, None)
    prover.sigma = sigma
    node = prover.trace.add_node(w)
    prover.trace.root_id = node
    return prover.sat_kab(w, node)


def sat_kde(sigma: ContextStack, w: FormulaSet, logic: LogicId,
            fuel: int | None = None) -> bool:
    """Direct entry to the De-engine for one saturation (testing surface)."""
    prover = _Prover(logic, DEFAULT_NODE_BUDGET, fuel, False, None)
    prover.sigma = sigma
    node = prover.trace.add_node(w)
    prover.trace.root_id = node
    return prover.sat_kde(w, node)


def sat_window(sigma: ContextStack, t: Window, parent: FormulaSet, logic: LogicId,
               goal: Formula | None = None, fuel: int | None = None) -> bool:
    """Run one window chain under an existing stack (testing surface)."""
    the_goal = goal if goal is not None else t.goal
    if the_goal is None:
        raise ValueError("window chains need the obligation goal")
    if t.k < 1:
        raise ValueError("window chains need at least two cells")
    prover = _Prover(logic, DEFAULT_NODE_BUDGET, fuel, False, None)
    prover.sigma = sigma
    node = prover.trace.add_node(parent)
    prover.trace.root_id = node
    entry0 = prover._push(Context(KIND_A, box_minus(parent, "a", logic), the_goal), None)
    chain: list[tuple[Window, int, int]] = []
    try:
        if logic.four_b:
            return prover._two_window(t, node, entry0)
        if fuel is not None:
            return prover._chain_fuel(t, parent, node, the_goal, entry0, chain, None, fuel)
        return prover._chain(t, parent, node, the_goal, entry0, chain, None)
    finally:
        prover.sigma.pop()
