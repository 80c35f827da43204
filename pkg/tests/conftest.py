"""Shared helpers: parsing shortcuts and brute-force reference oracles."""

from __future__ import annotations

from itertools import combinations

import pytest

from bitableau.formula import FormulaSet, csf, parse
from bitableau.saturation import is_ccs


def fs(*texts: str) -> FormulaSet:
    return FormulaSet(parse(t) for t in texts)


def all_ccs_bruteforce(u: FormulaSet) -> list[FormulaSet]:
    """Every CCS of u by filtering all subsets of csf(u); test oracle only."""
    universe = list(csf(u))
    extra = [g for g in universe if g not in u]
    out = []
    for k in range(len(extra) + 1):
        for picked in combinations(extra, k):
            w = u | FormulaSet(picked)
            if is_ccs(w, u):
                out.append(w)
    return out


@pytest.fixture
def mk():
    return fs
