"""Hot kernels for the brute-force model search.

The sweep over candidate models (relation pair x valuation) is the one
numeric inner loop in this package.  It ships in two interchangeable
backends: a numba-compiled kernel and a pure-numpy chunked fallback.
Selection is automatic (numba when importable) and can be forced with the
environment variable ``BITABLEAU_ORACLE_BACKEND=numba|numpy``.

Worlds are bitmask positions, relations are row-bitmask tables indexed by
the relation's integer encoding (bit s*n+t set iff (s,t) in the relation),
and formulas are flat post-order node arrays.  Model order is fixed:
world count ascending, then relation-a mask, relation-b mask, valuation
mask, counting only frame-valid models.  Both backends produce identical
witness indices.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


_ENV_FLAG = "BITABLEAU_ORACLE_BACKEND"
MAX_TABLE_WORLDS = 4


def backend_name(requested: str | None = None) -> str:
    """Resolve the backend: explicit argument, then env flag, then auto."""
    choice = requested or os.environ.get(_ENV_FLAG, "auto")
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown oracle backend {choice!r}")
    if choice == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return choice


@lru_cache(maxsize=None)
def frame_tables(n: int) -> np.ndarray:
    """Successor-row bitmasks for every relation over n worlds: shape (2^(n*n), n)."""
    if not 1 <= n <= MAX_TABLE_WORLDS:
        raise ValueError(f"world count {n} outside the tabulated range 1..{MAX_TABLE_WORLDS}")
    count = 1 << (n * n)
    masks = np.arange(count, dtype=np.int64)
    rows = np.empty((count, n), dtype=np.int64)
    full = (1 << n) - 1
    for s in range(n):
        rows[:, s] = (masks >> (s * n)) & full
    return rows


@lru_cache(maxsize=None)
def transitive_relations(n: int) -> np.ndarray:
    """Indices of transitive relations over n worlds, ascending."""
    succ = frame_tables(n)
    ok = np.ones(succ.shape[0], dtype=bool)
    for s in range(n):
        for t in range(n):
            has = ((succ[:, s] >> t) & 1).astype(bool)
            subset = (succ[:, t] & ~succ[:, s]) == 0
            ok &= ~has | subset
    return np.nonzero(ok)[0].astype(np.int64)


# --------------------------------------------------------------------------
# numba backend
# --------------------------------------------------------------------------

@njit(cache=True)
def _sweep_numba(succ, oka, okb, n, n_atoms, require_dense,
                 ops, arg1, arg2, needed, roots, witness, wit_cfg,
                 start_index, cap):
    """Returns (models_checked, hit_cap, all_found)."""
    full = (1 << n) - 1
    n_vals = 1 << (n_atoms * n)
    num_nodes = ops.shape[0]
    truth = np.zeros(num_nodes, dtype=np.int64)
    remaining = 0
    for ri in range(roots.shape[0]):
        if witness[ri] < 0:
            remaining += 1
    idx = start_index
    for pa in range(oka.shape[0]):
        ia = oka[pa]
        for pb in range(okb.shape[0]):
            ib = okb[pb]
            if require_dense:
                dense = True
                for s in range(n):
                    row = succ[ia, s]
                    cover = 0
                    for u in range(n):
                        if (row >> u) & 1:
                            cover |= succ[ib, u]
                    if row & ~cover:
                        dense = False
                        break
                if not dense:
                    continue
            for v in range(n_vals):
                if cap >= 0 and idx >= cap:
                    return idx - start_index, True, remaining == 0
                for node in range(num_nodes):
                    if not needed[node]:
                        continue
                    op = ops[node]
                    if op == 0:
                        t = 0
                    elif op == 1:
                        t = (v >> (arg1[node] * n)) & full
                    elif op == 2:
                        t = (~truth[arg1[node]]) & full
                    elif op == 3:
                        t = truth[arg1[node]] & truth[arg2[node]]
                    elif op == 4:
                        t = 0
                        child = truth[arg1[node]]
                        for s in range(n):
                            if succ[ia, s] & ~child == 0:
                                t |= 1 << s
                    else:
                        t = 0
                        child = truth[arg1[node]]
                        for s in range(n):
                            if succ[ib, s] & ~child == 0:
                                t |= 1 << s
                    truth[node] = t
                for ri in range(roots.shape[0]):
                    if witness[ri] < 0 and truth[roots[ri]] & 1:
                        witness[ri] = idx
                        wit_cfg[ri, 0] = ia
                        wit_cfg[ri, 1] = ib
                        wit_cfg[ri, 2] = v
                        remaining -= 1
                idx += 1
                if remaining == 0:
                    return idx - start_index, False, True
    return idx - start_index, False, remaining == 0


# --------------------------------------------------------------------------
# numpy backend
# --------------------------------------------------------------------------

def _dense_pairs(succ: np.ndarray, ia_blk: np.ndarray, ib_blk: np.ndarray,
                 n: int) -> np.ndarray:
    ok = np.ones(ia_blk.shape[0], dtype=bool)
    for s in range(n):
        row = succ[ia_blk, s]
        cover = np.zeros_like(row)
        for u in range(n):
            has = ((row >> u) & 1).astype(bool)
            cover = np.where(has, cover | succ[ib_blk, u], cover)
        ok &= (row & ~cover) == 0
    return ok


def _sweep_numpy(succ, oka, okb, n, n_atoms, require_dense,
                 ops, arg1, arg2, needed, roots, witness, wit_cfg,
                 start_index, cap, pair_chunk=2048):
    full = (1 << n) - 1
    n_vals = 1 << (n_atoms * n)
    vv = np.arange(n_vals, dtype=np.int64)
    needed_nodes = np.nonzero(needed)[0]
    ia_grid, ib_grid = np.meshgrid(oka, okb, indexing="ij")
    ia_flat = ia_grid.ravel()
    ib_flat = ib_grid.ravel()
    idx = start_index
    checked = 0
    open_roots = [ri for ri in range(roots.shape[0]) if witness[ri] < 0]
    for lo in range(0, ia_flat.shape[0], pair_chunk):
        ia_blk = ia_flat[lo:lo + pair_chunk]
        ib_blk = ib_flat[lo:lo + pair_chunk]
        if require_dense:
            keep = _dense_pairs(succ, ia_blk, ib_blk, n)
            ia_blk = ia_blk[keep]
            ib_blk = ib_blk[keep]
        pairs = ia_blk.shape[0]
        if pairs == 0:
            continue
        base = idx + np.arange(pairs, dtype=np.int64)[:, None] * n_vals  # (P,1)
        truth: dict[int, np.ndarray] = {}
        rows_a = succ[ia_blk]  # (P, n)
        rows_b = succ[ib_blk]
        for node in needed_nodes:
            op = ops[node]
            if op == 0:
                t = np.zeros((pairs, n_vals), dtype=np.int64)
            elif op == 1:
                t = np.broadcast_to((vv >> (arg1[node] * n)) & full,
                                    (pairs, n_vals)).astype(np.int64)
            elif op == 2:
                t = (~truth[arg1[node]]) & full
            elif op == 3:
                t = truth[arg1[node]] & truth[arg2[node]]
            else:
                rows = rows_a if op == 4 else rows_b
                child = truth[arg1[node]]
                t = np.zeros((pairs, n_vals), dtype=np.int64)
                for s in range(n):
                    hold = (rows[:, s][:, None] & ~child) == 0
                    t |= hold.astype(np.int64) << s
            truth[int(node)] = t
        model_ids = base + vv[None, :]  # (P, V) global indices
        in_budget = model_ids < cap if cap >= 0 else np.ones_like(model_ids, dtype=bool)
        for ri in list(open_roots):
            sat = (truth[int(roots[ri])] & 1).astype(bool) & in_budget
            if sat.any():
                flat = int(np.flatnonzero(sat.ravel())[0])
                p, v = divmod(flat, n_vals)
                witness[ri] = int(model_ids[p, v])
                wit_cfg[ri, 0] = int(ia_blk[p])
                wit_cfg[ri, 1] = int(ib_blk[p])
                wit_cfg[ri, 2] = v
                open_roots.remove(ri)
        block_models = pairs * n_vals
        if cap >= 0 and idx + block_models > cap:
            checked += cap - idx
            return checked, True, not open_roots
        idx += block_models
        checked += block_models
        if not open_roots:
            return checked, False, True
    return checked, False, not open_roots


def run_sweep(backend: str, succ, oka, okb, n, n_atoms, require_dense,
              ops, arg1, arg2, needed, roots, witness, wit_cfg,
              start_index, cap):
    """Dispatch one (world count) sweep to the chosen backend."""
    fn = _sweep_numba if backend == "numba" else _sweep_numpy
    return fn(succ, oka, okb, np.int64(n), np.int64(n_atoms), require_dense,
              ops, arg1, arg2, needed, roots, witness, wit_cfg,
              np.int64(start_index), np.int64(cap))
