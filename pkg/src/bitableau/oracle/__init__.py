"""Brute-force ground truth: bounded Kripke-model search and corpus enumeration.

The oracle is deliberately one-sided.  A witness within the world budget
proves satisfiability; silence proves nothing, because weakly dense
satisfiable formulas need not have models this small.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from ..formula import (
    AND,
    ATOM,
    BOT,
    BOXA,
    BOXB,
    NEG,
    FALSUM,
    Formula,
    atom,
    atoms_of,
    box_a,
    box_b,
    conj,
    neg,
)
from ..kripke import KripkeModel, frame_satisfies_logic, model_check
from ..saturation import LogicId
from . import kernels

_OPS = {BOT: 0, ATOM: 1, NEG: 2, AND: 3, BOXA: 4, BOXB: 5}


class OracleBudgetExceededError(RuntimeError):
    """The model budget ran out before the search space was exhausted."""


@dataclass(frozen=True)
class SearchBudget:
    max_worlds: int = 3
    max_models: int | None = None

    def __post_init__(self) -> None:
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")


@dataclass
class CompiledCorpus:
    ops: np.ndarray
    arg1: np.ndarray
    arg2: np.ndarray
    roots: np.ndarray          # node index of each input formula
    atom_names: tuple[str, ...]
    index: dict[Formula, int]


def compile_corpus(formulas: Sequence[Formula],
                   atom_names: Sequence[str] | None = None) -> CompiledCorpus:
    """Flatten the subformula closure into post-order node arrays."""
    closure: set[Formula] = set()
    stack = list(formulas)
    while stack:
        f = stack.pop()
        if f in closure:
            continue
        closure.add(f)
        if f.left is not None:
            stack.append(f.left)
        if f.right is not None:
            stack.append(f.right)
    ordered = sorted(closure, key=lambda f: f.sort_key)  # children precede parents
    index = {f: i for i, f in enumerate(ordered)}
    if atom_names is None:
        names = sorted({f.name for f in ordered if f.kind == ATOM})
    else:
        names = list(atom_names)
    atom_idx = {nm: i for i, nm in enumerate(names)}
    num = len(ordered)
    ops = np.zeros(num, dtype=np.int8)
    arg1 = np.zeros(num, dtype=np.int32)
    arg2 = np.zeros(num, dtype=np.int32)
    for i, f in enumerate(ordered):
        ops[i] = _OPS[f.kind]
        if f.kind == ATOM:
            arg1[i] = atom_idx[f.name]
        elif f.left is not None:
            arg1[i] = index[f.left]
            if f.right is not None:
                arg2[i] = index[f.right]
    roots = np.array([index[f] for f in formulas], dtype=np.int32)
    return CompiledCorpus(ops, arg1, arg2, roots, tuple(names), index)


def _needed_mask(corpus: CompiledCorpus, roots: np.ndarray) -> np.ndarray:
    needed = np.zeros(corpus.ops.shape[0], dtype=bool)
    stack = list(int(r) for r in roots)
    while stack:
        i = stack.pop()
        if needed[i]:
            continue
        needed[i] = True
        op = corpus.ops[i]
        if op >= 2:
            stack.append(int(corpus.arg1[i]))
            if op == 3:
                stack.append(int(corpus.arg2[i]))
    return needed


@dataclass
class SweepResult:
    witnesses: list[int]                     # global model index, -1 if none
    configs: list[tuple[int, int, int, int] | None]  # (n, ra, rb, val)
    models_checked: int
    capped: bool


def sweep_corpus(formulas: Sequence[Formula], logic: LogicId, *,
                 max_worlds: int = 3, max_models: int | None = None,
                 atom_names: Sequence[str] | None = None,
                 backend: str | None = None,
                 block_pairs: int = 16384) -> SweepResult:
    """Find, for each formula, the first frame-valid model satisfying it at world 0.

    Satisfied formulas drop out of the node evaluation as the sweep
    progresses, which is what makes the exhaustive corpus runs affordable.
    """
    chosen = kernels.backend_name(backend)
    corpus = compile_corpus(formulas, atom_names)
    n_atoms = max(1, len(corpus.atom_names))
    count = len(formulas)
    witnesses = np.full(count, -1, dtype=np.int64)
    configs: list[tuple[int, int, int, int] | None] = [None] * count
    cap = -1 if max_models is None else int(max_models)
    checked = 0
    for n in range(1, max_worlds + 1):
        tables = kernels.frame_tables(n)
        all_rel = np.arange(tables.shape[0], dtype=np.int64)
        oka = kernels.transitive_relations(n) if logic.four_a else all_rel
        okb = kernels.transitive_relations(n) if logic.four_b else all_rel
        # chunk the a-relation axis so the needed-node set can shrink between calls
        step = max(1, block_pairs // max(1, okb.shape[0]))
        for lo in range(0, oka.shape[0], step):
            alive = [i for i in range(count) if witnesses[i] < 0]
            if not alive:
                return SweepResult(list(witnesses), configs, checked, False)
            roots = corpus.roots[alive].astype(np.int64)
            needed = _needed_mask(corpus, roots)
            local_wit = np.full(len(alive), -1, dtype=np.int64)
            local_cfg = np.zeros((len(alive), 3), dtype=np.int64)
            done, hit_cap, _ = kernels.run_sweep(
                chosen, tables, oka[lo:lo + step], okb, n, n_atoms, logic.de,
                corpus.ops, corpus.arg1, corpus.arg2, needed, roots,
                local_wit, local_cfg, checked, cap)
            checked += int(done)
            for k, i in enumerate(alive):
                if local_wit[k] >= 0:
                    witnesses[i] = local_wit[k]
                    configs[i] = (n, int(local_cfg[k, 0]), int(local_cfg[k, 1]),
                                  int(local_cfg[k, 2]))
            if hit_cap:
                return SweepResult(list(witnesses), configs, checked, True)
    return SweepResult(list(witnesses), configs, checked, False)


def model_from_config(n: int, ra_mask: int, rb_mask: int, val_mask: int,
                      atom_names: Sequence[str]) -> KripkeModel:
    worlds = frozenset(range(n))
    ra = frozenset((s, t) for s in range(n) for t in range(n)
                   if (ra_mask >> (s * n + t)) & 1)
    rb = frozenset((s, t) for s in range(n) for t in range(n)
                   if (rb_mask >> (s * n + t)) & 1)
    val = {nm: frozenset(s for s in range(n) if (val_mask >> (i * n + s)) & 1)
           for i, nm in enumerate(atom_names)}
    return KripkeModel(worlds=worlds, rel_a=ra, rel_b=rb,
                       valuation={k: v for k, v in val.items() if v}, root=0)


def bounded_sat(f: Formula, logic: LogicId,
                budget: SearchBudget = SearchBudget(),
                backend: str | None = None) -> KripkeModel | None:
    """First small model of f (root = world 0), or None if none exists in budget.

    Raises OracleBudgetExceededError when max_models runs out before the
    bounded space is exhausted; that is a distinct outcome from None.
    """
    names = sorted(atoms_of(f))
    res = sweep_corpus([f], logic, max_worlds=budget.max_worlds,
                       max_models=budget.max_models, atom_names=names,
                       backend=backend)
    if res.witnesses[0] >= 0:
        cfg = res.configs[0]
        assert cfg is not None
        return model_from_config(cfg[0], cfg[1], cfg[2], cfg[3], names)
    if res.capped:
        raise OracleBudgetExceededError(
            f"model budget exhausted after {res.models_checked} models")
    return None


# --------------------------------------------------------------------------
# Pure-python reference enumeration (small scale; kernels are tested against it)
# --------------------------------------------------------------------------

def iter_models(n: int, atom_names: Sequence[str], logic: LogicId) -> Iterator[KripkeModel]:
    """All frame-valid models over n worlds in canonical order, root world 0."""
    rel_count = 1 << (n * n)
    n_atoms = max(1, len(atom_names))
    for ra_mask in range(rel_count):
        for rb_mask in range(rel_count):
            m = model_from_config(n, ra_mask, rb_mask, 0, atom_names)
            if not frame_satisfies_logic(m, logic):
                continue
            for val_mask in range(1 << (n_atoms * n)):
                yield model_from_config(n, ra_mask, rb_mask, val_mask, atom_names)


def bounded_sat_reference(f: Formula, logic: LogicId,
                          budget: SearchBudget = SearchBudget()) -> KripkeModel | None:
    """Definitional version of bounded_sat; the agreement target for the kernels."""
    names = sorted(atoms_of(f))
    checked = 0
    for n in range(1, budget.max_worlds + 1):
        for m in iter_models(n, names, logic):
            if budget.max_models is not None and checked >= budget.max_models:
                raise OracleBudgetExceededError(
                    f"model budget exhausted after {checked} models")
            checked += 1
            if model_check(m, 0, f):
                return m
    return None


# --------------------------------------------------------------------------
# Corpus enumeration
# --------------------------------------------------------------------------

_PALETTE = ("p", "q", "r", "s")


def corpus_atoms(count: int) -> tuple[str, ...]:
    if count <= len(_PALETTE):
        return _PALETTE[:count]
    return _PALETTE + tuple(f"a{i}" for i in range(count - len(_PALETTE)))


@lru_cache(maxsize=32)
def _by_size(atoms: int, max_size: int) -> tuple[tuple[Formula, ...], ...]:
    names = corpus_atoms(atoms)
    sizes: list[list[Formula]] = [[] for _ in range(max_size + 1)]
    if max_size >= 1:
        sizes[1] = sorted([FALSUM] + [atom(nm) for nm in names],
                          key=lambda f: f.key)
    for s in range(2, max_size + 1):
        batch = [neg(g) for g in sizes[s - 1]]
        batch += [box_a(g) for g in sizes[s - 1]]
        batch += [box_b(g) for g in sizes[s - 1]]
        for i in range(1, s - 1):
            batch += [conj(l, r) for l in sizes[i] for r in sizes[s - 1 - i]]
        sizes[s] = sorted(batch, key=lambda f: f.key)
    return tuple(tuple(row) for row in sizes)


def enumerate_corpus(atoms: int, max_size: int) -> Iterator[Formula]:
    """Every formula over the atom palette with size <= max_size, canonical order."""
    for row in _by_size(atoms, max_size):
        yield from row
