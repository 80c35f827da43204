"""Window search, continuations and repetition detection."""

from random import Random

from bitableau.formula import FormulaSet, atom, box_b, fset, neg, parse
from bitableau.sampling import random_formula, random_formula_set
from bitableau.saturation import KDE, KDE4A, KDE4A4B, box_minus, ccs_members, is_ccs
from bitableau.windows import (
    Window,
    find_continuation,
    find_window,
    is_window,
    window_sequence_loops,
)

from conftest import fs

p, q = atom("p"), atom("q")


def first(it):
    return next(iter(it), None)


class TestIsWindow:
    def test_basic_one_window(self):
        w = fs("~[a]~p")
        goal = neg(neg(p))
        t = Window((fset(goal, p), FormulaSet()), w, goal)
        assert is_window(t, KDE)

    def test_last_cell_must_saturate_the_a_projection(self):
        w = fs("~[a]~p", "[a]q")
        goal = neg(neg(p))
        bad = Window((fset(goal, p, q), FormulaSet()), w, goal)  # last cell misses q
        assert not is_window(bad, KDE)

    def test_goal_must_sit_in_first_cell(self):
        w = fs("~[a]~p")
        goal = neg(neg(p))
        t = Window((FormulaSet(), FormulaSet()), w, goal)
        assert not is_window(t, KDE)

    def test_four_b_monotonicity_violation(self):
        w = fs("~[a]~p")
        goal = neg(neg(p))
        # cell 0 lacks the box that cell 1 carries: box sets must shrink along i
        c1 = fset(box_b(p), p)
        c0 = fset(goal, p)
        t = Window((c0, c1), w, goal)
        assert not is_window(t, KDE4A4B)

    def test_window_equality_ignores_parent_and_goal(self):
        t1 = Window((fset(p),), fs("~[a]~p"), neg(neg(p)))
        t2 = Window((fset(p),), fs("~[a]~p", "q"), None)
        assert t1 == t2 and hash(t1) == hash(t2)


class TestFindWindow:
    def test_simple_diamond(self):
        w = fs("~[a]~p")
        goal = neg(neg(p))
        t = first(find_window(w, goal, KDE))
        assert t is not None and t.k == w.degree == 1
        assert goal in t.cells[0] and p in t.cells[0]
        assert is_window(t, KDE)

    def test_clash_gives_empty_stream(self):
        w = fs("~[a]p", "[a]p")
        goal = neg(p)
        assert first(find_window(w, goal, KDE)) is None

    def test_every_yielded_window_is_a_window(self):
        w = fs("~[a]~(p & ~[b]q)", "[a]~(q & p)", "[b]p")
        goal = neg(neg(parse("p & ~[b]q")))
        for logic in (KDE, KDE4A):
            seen = 0
            for t in find_window(w, goal, logic):
                assert is_window(t, logic)
                assert goal in t.cells[0]
                seen += 1
            assert seen > 0

    def test_four_b_two_windows(self):
        w = fs("~[a]~p")
        goal = neg(neg(p))
        t = first(find_window(w, goal, KDE4A4B))
        assert t is not None and t.k == 1
        assert box_minus(t.cells[1], "b", KDE4A4B) <= t.cells[0]
        assert is_window(t, KDE4A4B)

    def test_four_b_far_cell_supports_self_loop(self):
        # positive [b] content forces the far cell to absorb its own obligations
        w = fs("~[a]~q", "[a][b]p")
        goal = neg(neg(q))
        found = list(find_window(w, goal, KDE4A4B))
        assert found
        for t in found:
            w0, w1 = t.cells
            base = box_minus(w, "a", KDE4A4B)
            assert is_ccs(w1, base | box_minus(w1, "b", KDE4A4B))
            # the stationary tail of the infinite run: cells 1, 2, 3, ... all w1
            feed = base | box_minus(w1, "b", KDE4A4B)
            assert is_ccs(t.cells[0], feed.add(goal))

    def test_unrealizable_two_window(self):
        # [b]p & ~p inside every candidate far cell clashes through unfolding
        w = fs("~[a]~q", "[a]([b]p & ~p)")
        goal = neg(neg(q))
        assert first(find_window(w, goal, KDE4A4B)) is None


class TestContinuations:
    def test_zero_length_window(self):
        t = Window((fset(p),), fs("~[a]~p"), neg(neg(p)))
        # k = 0: any saturation of the a-projection continues it
        cont = first(find_continuation(t, KDE))
        assert cont is not None and cont.cells == (FormulaSet(),)

    def test_continuation_clauses(self):
        w = fs("~[a]~p")
        goal = neg(neg(p))
        t0 = first(find_window(w, goal, KDE))
        for t1 in find_continuation(t0, KDE):
            assert is_window(t1, KDE)
            assert t1.k == t0.k
            for i in range(1, t0.k + 1):
                feed = box_minus(t1.cells[i], "b", KDE) | t0.cells[i]
                assert is_ccs(t1.cells[i - 1], feed)

    def test_splice_is_longer_window(self):
        rng = Random(7)
        from bitableau.formula import box_a
        from bitableau.oracle import corpus_atoms

        names = corpus_atoms(2)
        done = 0
        while done < 60:
            body = random_formula(rng, names, 6)
            w_seed = random_formula_set(rng, 2, 2, 6).add(neg(box_a(body)))
            members = ccs_members(w_seed)
            if not members:
                continue
            w = rng.choice(members)
            goals = [neg(g.left.left) for g in w
                     if g.kind == "neg" and g.left.kind == "boxa"]
            if not goals or w.degree < 1:
                continue
            logic = rng.choice((KDE, KDE4A))
            t0 = first(find_window(w, goals[0], logic))
            if t0 is None:
                continue
            t1 = first(find_continuation(t0, logic))
            if t1 is None:
                continue
            spliced = Window((t0.cells[0],) + t1.cells, w, t0.goal)
            assert spliced.k == t0.k + 1
            assert is_window(spliced, logic)
            done += 1


class TestContinuationDeadEnd:
    def test_rejected_under_transitive_b(self):
        import pytest

        w = fs("~[a]~p")
        goal = neg(neg(p))
        t = first(find_window(w, goal, KDE4A4B))
        with pytest.raises(ValueError):
            next(find_continuation(t, KDE4A4B))

    def test_unsatisfiable_feed_gives_empty_stream(self):
        # every shifted far cell carries [b]~p, whose projection clashes with
        # the p sitting in the old cell
        parent = fs("[a][b]~p")
        goal = neg(neg(p))
        t = Window((fset(goal, p), fset(p, parse("[b]~p"))), parent, goal)
        assert first(find_continuation(t, KDE)) is None


class TestLoopDetection:
    def test_membership(self):
        t = Window((fset(p),), fs("~[a]~p"), None)
        same = Window((fset(p),), fs("~[a]~p"), None)
        assert window_sequence_loops({t}, same)
        assert window_sequence_loops([t], same)
        assert not window_sequence_loops(set(), t)
        assert not window_sequence_loops([], t)

    def test_chain_for_simple_diamond_loops_fast(self):
        w = fs("~[a]~p")
        goal = neg(neg(p))
        t = first(find_window(w, goal, KDE))
        seen = {t}
        steps = 0
        while steps < 10:
            t = first(find_continuation(t, KDE))
            steps += 1
            if window_sequence_loops(seen, t):
                break
            seen.add(t)
        else:
            raise AssertionError("chain did not repeat")
        assert steps <= 3
