"""The decision procedures: verdicts, certificates, loops, budgets, modes."""

import pytest

from bitableau.engine import (
    BudgetExceededError,
    ContextStack,
    decide,
    sat_kab,
    sat_kde,
    sat_window,
    valid,
)
from bitableau.formula import FormulaSet, atom, dia_a, fset, neg, parse
from bitableau.kripke import certify, is_weakly_dense
from bitableau.oracle import enumerate_corpus
from bitableau.saturation import (
    ALL_LOGICS,
    KAB,
    KAB4A,
    KAB4A4B,
    KDE,
    KDE4A,
    KDE4A4B,
    ccs_members,
)
from bitableau.windows import find_window

p, q = atom("p"), atom("q")
DE_AXIOM = "[a][b]p -> [a]p"


class TestDecide:
    def test_contradiction(self):
        for logic in ALL_LOGICS:
            res = decide(parse("p & ~p"), logic)
            assert not res.satisfiable and res.model is None

    def test_density_axiom_negation_unsat_in_de(self):
        f = neg(parse(DE_AXIOM))
        assert not decide(f, KDE).satisfiable
        assert not decide(f, KDE4A).satisfiable
        assert not decide(f, KDE4A4B).satisfiable

    def test_density_axiom_negation_sat_in_kab(self):
        f = neg(parse(DE_AXIOM))
        for logic in (KAB, KAB4A, KAB4A4B):
            res = decide(f, logic)
            assert res.satisfiable
            assert certify(res.model, f, logic)

    def test_simple_diamond_has_dense_witness(self):
        res = decide(parse("<a>p"), KDE)
        assert res.satisfiable
        assert is_weakly_dense(res.model)
        assert certify(res.model, parse("<a>p"), KDE)

    def test_clashing_window(self):
        assert not decide(parse("<a>p & [a][b]~p"), KDE).satisfiable
        assert not decide(parse("<a>p & [a][b]~p"), KDE4A4B).satisfiable

    def test_determinism(self):
        f = parse("<a>(p | <b>q) & [a]~q")
        a = decide(f, KDE4A)
        b = decide(f, KDE4A)
        assert a.satisfiable == b.satisfiable
        assert a.model.to_json() == b.model.to_json()
        assert a.stats.as_dict() == b.stats.as_dict()

    def test_budget_error_is_distinct(self):
        with pytest.raises(BudgetExceededError):
            decide(parse("<a><b><a>p"), KDE, budget_nodes=1)

    def test_time_budget(self):
        with pytest.raises(BudgetExceededError):
            decide(parse("<a><b><a>p & <b><a><b>q"), KDE4A, time_limit=0.0)


class TestValid:
    def test_density_axiom(self):
        assert valid(parse(DE_AXIOM), KDE)
        assert not valid(parse(DE_AXIOM), KAB)

    def test_diamond_chain(self):
        assert valid(parse("<a>p -> <a><b>p"), KDE)
        assert not valid(parse("<a>p -> <a><b>p"), KAB)

    def test_transitivity_axioms(self):
        assert valid(parse("[a]p -> [a][a]p"), KAB4A)
        assert not valid(parse("[a]p -> [a][a]p"), KAB)
        assert valid(parse("[b]p -> [b][b]p"), KAB4A4B)
        assert not valid(parse("[b]p -> [b][b]p"), KAB4A)


class TestLoops:
    def test_box_diamond_loop_terminates(self):
        f = parse("[a]<a>p & <a>p")
        for logic in (KAB4A, KAB4A4B, KDE4A, KDE4A4B):
            res = decide(f, logic)
            assert res.satisfiable
            assert certify(res.model, f, logic)

    def test_literal_loop_rule_refutes(self):
        f = parse("[a]<a>p & <a>p")
        for logic in (KAB4A, KDE4A, KDE4A4B):
            assert not decide(f, logic, literal_loop_rule=True).satisfiable
        # without transitivity no loop is needed, so the flag changes nothing
        assert decide(f, KAB, literal_loop_rule=True).satisfiable

    def test_b_side_loop(self):
        f = parse("[b]<b>p & <b>p")
        res = decide(f, KAB4A4B)
        assert res.satisfiable and certify(res.model, f, KAB4A4B)

    def test_transitive_projection_closes_nested_diamonds(self):
        # the second a-step still carries [a]~p under transitivity, so the
        # inner witness clashes; without it the chain is fine
        f = parse("<a><a>p & [a]~p")
        assert not decide(f, KAB4A).satisfiable
        assert decide(f, KAB).satisfiable


class TestFuelMode:
    def test_same_verdicts_small(self):
        for text in ("<a>p", "<a>p & [a]q", "<a>(p & <b>q)", "<a>p & [a][b]~p"):
            f = parse(text)
            a = decide(f, KDE).satisfiable
            b = decide(f, KDE, fuel=64).satisfiable
            assert a == b, text

    def test_fuel_chain_diagnostics(self):
        res = decide(parse("<a>p"), KDE, fuel=64)
        assert res.satisfiable
        d = res.diagnostics
        assert d.fuel_chains_completed >= 1
        assert d.fuel_chains_completed == d.fuel_chains_with_repeat

    def test_fuel_model_certifies(self):
        f = parse("<a>(p & <b>q)")
        res = decide(f, KDE, fuel=64)
        assert res.satisfiable and certify(res.model, f, KDE)


class TestHeirDiagnostics:
    def test_degree_drop_holds_on_curated_nest(self):
        f = parse("<a>(<b>(<a>p & [a]p)) & [a][b]([a]p & [a]q)")
        res = decide(f, KDE4A)
        trips = [t for t in res.diagnostics.heir_triples if t[5]]
        assert trips, "expected a contentful alternating triple"
        assert not res.diagnostics.alternation_violations()

    def test_diagnostic_detects_the_goal_degree_boundary(self):
        # When the goal formula outweighs the transferred context, the raw
        # degree-drop claim fails; the diagnostic must surface that.
        f = parse("<b>(<a>(~[b]p & [b]q))")
        res = decide(f, KDE4A)
        assert res.satisfiable
        assert res.diagnostics.alternation_violations()


class TestDirectSurfaces:
    def test_sat_kab_no_diamonds(self):
        assert sat_kab(ContextStack(), fset(p), KAB)

    def test_sat_kab_clashing_successor(self):
        # the successor saturation must contain both p and ~p, so it clashes
        (w,) = ccs_members(fset(dia_a(p), parse("[a](~p & q)")))
        assert not sat_kab(ContextStack(), w, KAB)

    def test_sat_kab_structural_clash_has_no_saturation(self):
        # ~[a]~p against [a]~p clashes classically: the stream is empty,
        # which is the engine-level "choose returned the failure marker"
        assert ccs_members(fset(dia_a(p), parse("[a]~p"))) == ()

    def test_sat_kde_simple(self):
        (w,) = ccs_members(FormulaSet((parse("<a>p"),)))
        assert sat_kde(ContextStack(), w, KDE)

    def test_sat_window_two_cell(self):
        w = next(iter(ccs_members(FormulaSet((parse("<a>p"),)))))
        goal = neg(neg(p))
        t = next(iter(find_window(w, goal, KDE4A4B)))
        assert sat_window(ContextStack(), t, w, KDE4A4B)

    def test_sat_window_chain(self):
        w = next(iter(ccs_members(FormulaSet((parse("<a>p"),)))))
        goal = neg(neg(p))
        t = next(iter(find_window(w, goal, KDE)))
        assert sat_window(ContextStack(), t, w, KDE)
        assert sat_window(ContextStack(), t, w, KDE, fuel=16)


class TestMonotonicity:
    def test_extensions_prove_more(self):
        corpus = list(enumerate_corpus(1, 5))
        base = {f: decide(f, KAB).satisfiable for f in corpus}
        for logic in (KAB4A, KAB4A4B, KDE, KDE4A, KDE4A4B):
            for f in corpus:
                if not base[f]:
                    assert not decide(f, logic).satisfiable, (f, logic.name)


class TestTrace:
    def test_edges_reference_known_nodes(self):
        from bitableau.engine import AEdge, BEdge, NodeEntered

        res = decide(parse("<a>(p & <b>q) & <b>p"), KDE4A)
        assert res.satisfiable and res.trace is not None
        seen = set()
        for ev in res.trace.events:
            if isinstance(ev, NodeEntered):
                seen.add(ev.node)
            elif isinstance(ev, (AEdge, BEdge)):
                assert ev.src in seen and ev.dst in seen

    def test_plain_kde_recursion_drops_degree(self):
        # without transitivity every recursion step loses one modal level;
        # only the sibling edges inside one window chain may tie
        from bitableau.engine import AEdge, BEdge, NodeEntered, WindowChain

        for text in ("<a>(p & <b>q)", "<a><b><a>p", "<b>(q & <a>p) & [b]<a>q"):
            res = decide(parse(text), KDE)
            assert res.satisfiable
            cells = {ev.node: ev.cell for ev in res.trace.events
                     if isinstance(ev, NodeEntered)}
            chain_cells = set()
            for ev in res.trace.events:
                if isinstance(ev, WindowChain):
                    chain_cells.update(ev.cell_nodes)
            for ev in res.trace.events:
                if isinstance(ev, AEdge):
                    assert cells[ev.dst].degree < cells[ev.src].degree
                elif isinstance(ev, BEdge):
                    if ev.src in chain_cells and ev.dst in chain_cells:
                        continue  # siblings along the same chain
                    assert cells[ev.dst].degree < cells[ev.src].degree


class TestStats:
    def test_counters_populated(self):
        res = decide(parse("<a>(p & <b>q) & [a]p"), KDE4A)
        s = res.stats
        assert s.nodes_visited > 0
        assert s.ccs_enumerated > 0
        assert s.max_window_chain >= 1
        assert s.max_stack_depth >= 1
        assert set(s.as_dict()) == {
            "nodes_visited", "ccs_enumerated", "max_stack_depth", "max_window_chain"}
