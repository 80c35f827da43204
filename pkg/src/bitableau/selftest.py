"""Suite runners shared by the CLI selftest command and the acceptance tests.

Each runner returns a report object whose ``violations`` list must stay
empty.  The acceptance tests call these with the full criterion parameters;
the CLI defaults are trimmed for quick checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from random import Random
from typing import Callable, Iterable, Sequence

from .engine import decide, valid
from .formula import BOXA, NEG, Formula, FormulaSet, box_a, csf, neg, print_formula
from .kripke import certify, model_check, restrict_to_reachable
from .oracle import corpus_atoms, enumerate_corpus, sweep_corpus
from .sampling import random_formula, random_formula_set, random_model
from .saturation import (
    ALL_LOGICS,
    KDE,
    KDE4A,
    KDE4A4B,
    LogicId,
    box_minus,
    ccs_members,
    is_ccs,
)
from .windows import Window, find_continuation, find_window, is_window


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def line(self) -> str:
        status = "pass" if self.ok else "FAIL"
        extra = f" ({len(self.violations)} violations)" if self.violations else ""
        return f"[{status}] {self.name}: {self.checked} checks{extra}"


# --------------------------------------------------------------------------
# Oracle agreement, dual consistency and depth statistics over a corpus
# --------------------------------------------------------------------------

@dataclass
class CorpusReport:
    agreement: SuiteReport
    duals: SuiteReport
    depth: SuiteReport
    decided_sat: dict[LogicId, list[bool]]


def run_corpus(formulas: Sequence[Formula], logics: Iterable[LogicId] = ALL_LOGICS, *,
               max_worlds: int = 3, backend: str | None = None,
               budget_nodes: int = 10_000_000,
               progress: Callable[[str], None] | None = None) -> CorpusReport:
    """Oracle agreement (sat side), dual consistency, and the stack-depth bound."""
    agreement = SuiteReport("oracle agreement")
    duals = SuiteReport("dual consistency")
    depth = SuiteReport("stack depth bound", info={"max_ratio": 0.0})
    decided: dict[LogicId, list[bool]] = {}
    formulas = list(formulas)
    for logic in logics:
        sweep = sweep_corpus(formulas, logic, max_worlds=max_worlds, backend=backend)
        sat_flags: list[bool] = []
        for f, witness in zip(formulas, sweep.witnesses):
            res = decide(f, logic, budget_nodes=budget_nodes)
            sat_flags.append(res.satisfiable)
            agreement.checked += 1
            if witness >= 0 and not res.satisfiable:
                agreement.violations.append(
                    f"{logic.name}: oracle found a model but decide says unsat: "
                    f"{print_formula(f)}")
            duals.checked += 1
            if res.satisfiable == valid(neg(f), logic, budget_nodes=budget_nodes):
                duals.violations.append(
                    f"{logic.name}: decide({print_formula(f)}) disagrees with its dual")
            if logic.four_a or logic.four_b:
                depth.checked += 1
                bound = 2 * f.size ** 4
                ratio = res.stats.max_stack_depth / bound
                depth.info["max_ratio"] = max(depth.info["max_ratio"], ratio)
                if res.stats.max_stack_depth > bound:
                    depth.violations.append(
                        f"{logic.name}: stack depth {res.stats.max_stack_depth} "
                        f"exceeds 2|u|^4={bound} on {print_formula(f)}")
        decided[logic] = sat_flags
        if progress is not None:
            progress(f"corpus [{logic.name}]: {len(formulas)} formulas, "
                     f"{sum(sat_flags)} sat, oracle witnesses "
                     f"{sum(1 for w in sweep.witnesses if w >= 0)}")
    return CorpusReport(agreement, duals, depth, decided)


# --------------------------------------------------------------------------
# Certificate completeness over random formulas
# --------------------------------------------------------------------------

def run_certificates(logic: LogicId, count: int, *, atoms: int = 2, max_size: int = 12,
                     seed: int = 0, budget_nodes: int = 10_000_000) -> SuiteReport:
    """Every sat verdict must ship a model passing certify (plus the reachable cut)."""
    rep = SuiteReport(f"certificates [{logic.name}]",
                      info={"sat": 0, "max_depth_ratio": 0.0})
    rng = Random(seed if seed else hash(logic.name) & 0xFFFF)
    names = corpus_atoms(atoms)
    seen: set[Formula] = set()
    while rep.checked < count:
        f = random_formula(rng, names, max_size)
        if f in seen:
            continue
        seen.add(f)
        rep.checked += 1
        res = decide(f, logic, budget_nodes=budget_nodes)
        if logic.four_a or logic.four_b:
            ratio = res.stats.max_stack_depth / (2 * f.size ** 4)
            rep.info["max_depth_ratio"] = max(rep.info["max_depth_ratio"], ratio)
            if ratio > 1:
                rep.violations.append(
                    f"{logic.name}: stack depth bound broken on {print_formula(f)}")
        if not res.satisfiable:
            continue
        rep.info["sat"] += 1
        model = res.model
        if model is None or not certify(model, f, logic):
            rep.violations.append(f"{logic.name}: bad certificate for {print_formula(f)}")
            continue
        reachable = restrict_to_reachable(model)
        if not certify(reachable, f, logic):
            rep.violations.append(
                f"{logic.name}: reachable cut fails certify for {print_formula(f)}")
    return rep


# --------------------------------------------------------------------------
# Saturation closure properties
# --------------------------------------------------------------------------

def _pick(rng: Random, options: tuple) -> object | None:
    return rng.choice(options) if options else None


def run_prop_suite(samples: int, *, seed: int = 1234,
                   atoms: int = 2, max_elems: int = 4, max_elem_size: int = 7) -> SuiteReport:
    """Closure properties of saturations, items (1)-(6), on random instances.

    Items (5) and (6) restrict with the classical closure csf: intersecting
    with the full modal closure sf can escape csf(u) (take u = {[b]p} inside
    a base that also carries p), so the sf variant is refutable.
    """
    rep = SuiteReport("saturation closure properties")
    rng = Random(seed)
    attempts = 0
    while rep.checked < samples and attempts < samples * 60:
        attempts += 1
        u = random_formula_set(rng, atoms, max_elems, max_elem_size)
        v = random_formula_set(rng, atoms, max_elems, max_elem_size)
        w1 = _pick(rng, ccs_members(v))
        if w1 is None:
            continue
        w = _pick(rng, ccs_members(u | w1))
        if w is None:
            continue
        rep.checked += 1
        # (1) composition
        if not is_ccs(w, u | v):
            rep.violations.append(f"(1) failed: u={u} v={v}")
        # (4) degree of the fresh part
        if (w - w1) and (w - w1).degree > u.degree:
            rep.violations.append(f"(4) failed: u={u} v={v}")
        # (2) splitting, on a CCS of a plain union
        wv = _pick(rng, ccs_members(u | v))
        if wv is not None:
            v1 = wv & csf(u)
            v2 = wv & csf(v)
            if not (is_ccs(v1, u) and is_ccs(v2, v) and (v1 | v2) == wv):
                rep.violations.append(f"(2) failed: u={u} v={v}")
        # (5) restriction to a subset of the base
        sub = FormulaSet(g for g in v if rng.random() < 0.5)
        if wv is not None and not is_ccs(csf(sub) & wv, sub):
            rep.violations.append(f"(5) failed: sub={sub} v={v}")
        # enumerate_ccs postconditions
        if w.degree != (u | w1).degree or not (w <= csf(u | w1)):
            rep.violations.append(f"enumeration postcondition failed: u={u} w1={w1}")
        if len(w) > len(csf(u | w1)) or w.total_size > csf(u | w1).total_size:
            rep.violations.append(f"size bound failed: u={u} w1={w1}")
    # (6) semantic saturations, from random models
    names = corpus_atoms(atoms)
    sem_target = max(1, samples // 10)
    done = 0
    attempts = 0
    while done < sem_target and attempts < sem_target * 200:
        attempts += 1
        m = random_model(rng, names, 3)
        candidates = [random_formula(rng, names, max_elem_size) for _ in range(4)]
        u = FormulaSet(g for g in candidates if model_check(m, m.root, g))
        if not u:
            continue
        done += 1
        rep.checked += 1
        truths = FormulaSet(g for g in csf(u) if model_check(m, m.root, g))
        if not is_ccs(truths, u):
            rep.violations.append(f"(6) failed: u={u}")
    rep.info["semantic_instances"] = done
    return rep


# --------------------------------------------------------------------------
# Window properties
# --------------------------------------------------------------------------

def run_continuation_suite(samples: int, *, seed: int = 99,
                           logics: Sequence[LogicId] = (KDE, KDE4A),
                           atoms: int = 2, max_elem_size: int = 6) -> SuiteReport:
    """Splicing a continuation onto its window yields a one-longer window."""
    rep = SuiteReport("continuation splice")
    rng = Random(seed)
    names = corpus_atoms(atoms)
    attempts = 0
    while rep.checked < samples and attempts < samples * 120:
        attempts += 1
        logic = rng.choice(list(logics))
        body = random_formula(rng, names, max_elem_size)
        seed_set = random_formula_set(rng, atoms, 2, max_elem_size).add(neg(box_a(body)))
        members = ccs_members(seed_set)
        if not members:
            continue
        w = rng.choice(members)
        goals = [neg(g.left.left) for g in w if g.kind == NEG and g.left.kind == BOXA]
        if not goals or w.degree < 1:
            continue
        goal = rng.choice(goals)
        t0 = next(iter(find_window(w, goal, logic)), None)
        if t0 is None:
            continue
        t1 = next(iter(find_continuation(t0, logic)), None)
        if t1 is None:
            continue
        rep.checked += 1
        spliced = Window((t0.cells[0],) + t1.cells, w, goal)
        if spliced.k != t0.k + 1 or not is_window(spliced, logic):
            rep.violations.append(f"splice failed: w={w} goal={print_formula(goal)}")
    return rep


def run_two_window_suite(samples: int, logic: LogicId, *, seed: int = 7,
                         atoms: int = 2, max_elem_size: int = 6) -> SuiteReport:
    """The far cell of a 2-window really supports the infinite self-loop."""
    rep = SuiteReport(f"2-window self-loop [{logic.name}]")
    if not logic.four_b:
        raise ValueError("the 2-window suite needs a logic with 4(b)")
    rng = Random(seed)
    names = corpus_atoms(atoms)
    attempts = 0
    while rep.checked < samples and attempts < samples * 120:
        attempts += 1
        body = random_formula(rng, names, max_elem_size)
        seed_set = random_formula_set(rng, atoms, 2, max_elem_size).add(neg(box_a(body)))
        members = ccs_members(seed_set)
        if not members:
            continue
        w = rng.choice(members)
        goals = [neg(g.left.left) for g in w if g.kind == NEG and g.left.kind == BOXA]
        if not goals:
            continue
        goal = rng.choice(goals)
        t = next(iter(find_window(w, goal, logic)), None)
        if t is None:
            continue
        rep.checked += 1
        w0, w1 = t.cells
        base = box_minus(w, "a", logic)
        feed = base | box_minus(w1, "b", logic)
        # stationary infinite run w0, w1, w1, ...: clause at 0 and at every i >= 1
        if goal not in w0 or not is_ccs(w0, feed.add(goal)) or not is_ccs(w1, feed):
            rep.violations.append(f"self-loop clauses failed: w={w}")
        if not (box_minus(w1, "b", logic) <= w0):
            rep.violations.append(f"containment failed: w={w}")
    return rep


# --------------------------------------------------------------------------
# Termination-mode equivalence and heir-alternation checks
# --------------------------------------------------------------------------

def run_fuel_equivalence(formulas: Sequence[Formula], *, fuel: int = 64,
                         logic: LogicId = KDE,
                         budget_nodes: int = 10_000_000) -> SuiteReport:
    """Loop detection and the explicit countdown must give identical verdicts,
    and every countdown chain must revisit a window before the fuel runs out."""
    rep = SuiteReport(f"termination modes [{logic.name}, fuel {fuel}]",
                      info={"chains": 0})
    for f in formulas:
        rep.checked += 1
        by_loop = decide(f, logic, budget_nodes=budget_nodes)
        by_fuel = decide(f, logic, budget_nodes=budget_nodes, fuel=fuel)
        if by_loop.satisfiable != by_fuel.satisfiable:
            rep.violations.append(f"verdicts diverge on {print_formula(f)}")
        diag = by_fuel.diagnostics
        rep.info["chains"] += diag.fuel_chains_completed
        if diag.fuel_chains_completed != diag.fuel_chains_with_repeat:
            rep.violations.append(
                f"a fuel chain ran {fuel} steps without repeating on {print_formula(f)}")
    return rep


def run_heir_alternation(formulas: Sequence[Formula],
                         logics: Sequence[LogicId], *,
                         budget_nodes: int = 10_000_000) -> SuiteReport:
    """Degree drop across a modality switch between nested heirs.

    Whenever an a-heir context is immediately followed by a b-heir context
    (or conversely) along a branch, the new context's degree must drop below
    the one two steps up.  Empty contexts carry no formulas and are exempt.
    """
    rep = SuiteReport("heir alternation degree drop", info={"triples": 0})
    for logic in logics:
        for f in formulas:
            rep.checked += 1
            res = decide(f, logic, budget_nodes=budget_nodes)
            triples = [t for t in res.diagnostics.heir_triples if t[5]]
            rep.info["triples"] += len(triples)
            for trip in res.diagnostics.alternation_violations():
                rep.violations.append(
                    f"{logic.name}: {trip} on {print_formula(f)}")
    return rep


# --------------------------------------------------------------------------
# Full selftest entry point
# --------------------------------------------------------------------------

def run_selftest(*, atoms: int = 1, max_size: int = 5, max_worlds: int = 3,
                 property_samples: int = 2000, verbose: bool = True) -> bool:
    def say(msg: str) -> None:
        if verbose:
            print(msg)

    started = time.perf_counter()
    corpus = list(enumerate_corpus(atoms, max_size))
    say(f"corpus: {len(corpus)} formulas over {atoms} atom(s), size <= {max_size}")
    reports: list[SuiteReport] = []
    cr = run_corpus(corpus, max_worlds=max_worlds, progress=say if verbose else None)
    reports += [cr.agreement, cr.duals, cr.depth]
    reports.append(run_prop_suite(property_samples))
    reports.append(run_continuation_suite(max(50, property_samples // 20)))
    reports.append(run_two_window_suite(max(50, property_samples // 20), KDE4A4B))
    reports.append(run_fuel_equivalence(corpus, fuel=64, logic=KDE))
    reports.append(run_heir_alternation(corpus, (KDE4A, KDE4A4B)))
    for logic in ALL_LOGICS:
        reports.append(run_certificates(logic, max(40, property_samples // 50)))
    ok = True
    for rep in reports:
        say(rep.line())
        ok = ok and rep.ok
        for bad in rep.violations[:5]:
            say(f"    {bad}")
    say(f"selftest {'passed' if ok else 'FAILED'} in {time.perf_counter() - started:.1f}s")
    return ok
