"""Benchmark the oracle sweep kernels: numba against the numpy fallback.

Run as ``python -m bitableau.oracle.bench``.  The workload is the exhaustive
small-formula corpus swept over all models with up to three worlds, which is
exactly the shape of the oracle-agreement suite.
"""

from __future__ import annotations

import argparse
import time

from ..saturation import logic_by_name
from . import enumerate_corpus, sweep_corpus
from .kernels import HAS_NUMBA


def _run(backend: str, formulas, logic, max_worlds: int) -> tuple[float, int, int]:
    start = time.perf_counter()
    res = sweep_corpus(formulas, logic, max_worlds=max_worlds, backend=backend)
    elapsed = time.perf_counter() - start
    found = sum(1 for w in res.witnesses if w >= 0)
    return elapsed, found, res.models_checked


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--atoms", type=int, default=1)
    ap.add_argument("--max-size", type=int, default=6)
    ap.add_argument("--max-worlds", type=int, default=3)
    ap.add_argument("--logic", default="kde")
    args = ap.parse_args(argv)

    logic = logic_by_name(args.logic)
    formulas = list(enumerate_corpus(args.atoms, args.max_size))
    print(f"corpus: {len(formulas)} formulas ({args.atoms} atom(s), size <= {args.max_size}); "
          f"logic {logic.name}; worlds <= {args.max_worlds}")

    backends = ["numpy"]
    if HAS_NUMBA:
        # warm once so the JIT compile does not pollute the timing
        sweep_corpus(formulas[:4], logic, max_worlds=1, backend="numba")
        backends.insert(0, "numba")
    else:
        print("numba not importable; benchmarking the numpy fallback only")

    results = {}
    for backend in backends:
        elapsed, found, checked = _run(backend, formulas, logic, args.max_worlds)
        results[backend] = (elapsed, found, checked)
        print(f"{backend:>6}: {elapsed:8.3f} s   witnesses {found:6d}   models {checked}")

    if len(results) == 2:
        wit = {b: r[1] for b, r in results.items()}
        if wit["numba"] != wit["numpy"]:
            print("BACKEND MISMATCH: witness counts differ")
            return 1
        ratio = results["numpy"][0] / max(results["numba"][0], 1e-9)
        print(f"speedup numba vs numpy: {ratio:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
