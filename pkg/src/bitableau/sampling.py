"""Seeded random generators for formulas, sets and small models.

Everything here is deterministic given the Random instance, so suite runs
are reproducible without a seed flag.
"""

from __future__ import annotations

from random import Random
from typing import Sequence

from .formula import FALSUM, Formula, FormulaSet, atom, box_a, box_b, conj, neg
from .kripke import KripkeModel
from .oracle import corpus_atoms


def random_formula(rng: Random, atom_names: Sequence[str], max_size: int) -> Formula:
    """One formula with size <= max_size over the given atoms."""
    if max_size <= 1:
        if rng.random() < 0.15:
            return FALSUM
        return atom(rng.choice(atom_names))
    roll = rng.random()
    if roll < 0.25:
        if rng.random() < 0.12:
            return FALSUM
        return atom(rng.choice(atom_names))
    if roll < 0.55:
        return neg(random_formula(rng, atom_names, max_size - 1))
    if roll < 0.70:
        return box_a(random_formula(rng, atom_names, max_size - 1))
    if roll < 0.85 or max_size < 3:  # conjunctions need room for two children
        return box_b(random_formula(rng, atom_names, max_size - 1))
    left_budget = rng.randint(1, max_size - 2)
    left = random_formula(rng, atom_names, left_budget)
    right = random_formula(rng, atom_names, max_size - 1 - left.size)
    return conj(left, right)


def random_formula_set(rng: Random, atoms: int = 2, max_elems: int = 8,
                       max_elem_size: int = 10) -> FormulaSet:
    names = corpus_atoms(atoms)
    count = rng.randint(0, max_elems)
    return FormulaSet(random_formula(rng, names, rng.randint(1, max_elem_size))
                      for _ in range(count))


def random_model(rng: Random, atom_names: Sequence[str], max_worlds: int = 3) -> KripkeModel:
    """An arbitrary small pointed model (no frame conditions imposed)."""
    n = rng.randint(1, max_worlds)
    worlds = frozenset(range(n))
    density = 0.4
    ra = frozenset((s, t) for s in range(n) for t in range(n) if rng.random() < density)
    rb = frozenset((s, t) for s in range(n) for t in range(n) if rng.random() < density)
    val = {}
    for nm in atom_names:
        ws = frozenset(s for s in range(n) if rng.random() < 0.5)
        if ws:
            val[nm] = ws
    return KripkeModel(worlds=worlds, rel_a=ra, rel_b=rb, valuation=val,
                       root=rng.randrange(n))
