"""Formula AST, grammar, measures and closure operators."""

import pytest
from hypothesis import given, strategies as st

from bitableau.formula import (
    FALSUM,
    FormulaSet,
    FormulaSyntaxError,
    atom,
    box_a,
    box_b,
    conj,
    csf,
    degree,
    dia_a,
    fset,
    neg,
    parse,
    print_formula,
    sf,
    size,
)

p, q = atom("p"), atom("q")


class TestParse:
    def test_atom(self):
        assert parse("p") == p

    def test_diamond_desugars(self):
        assert parse("<a>p") == neg(box_a(neg(p)))

    def test_implication_desugars(self):
        assert parse("[a]([b]p) -> [a]p") == neg(conj(box_a(box_b(p)), neg(box_a(p))))

    def test_disjunction_and_constants(self):
        assert parse("p | q") == neg(conj(neg(p), neg(q)))
        assert parse("true") == neg(FALSUM)
        assert parse("false") == FALSUM

    def test_precedence(self):
        # -> binds loosest and to the right; & tighter than |
        assert parse("p -> q -> p") == parse("p -> (q -> p)")
        assert parse("p & q | q") == parse("(p & q) | q")
        assert parse("~[a]p & q") == conj(neg(box_a(p)), q)

    def test_atom_names(self):
        f = parse("my_atom2")
        assert f.kind == "atom" and f.name == "my_atom2"

    @pytest.mark.parametrize("bad,pos", [
        ("p & & q", 4),
        ("", 0),
        ("[c]p", 0),
        ("(p", 2),
        ("p q", 2),
        ("P", 0),
    ])
    def test_errors_carry_position(self, bad, pos):
        with pytest.raises(FormulaSyntaxError) as err:
            parse(bad)
        assert err.value.position == pos

    def test_whitespace_insensitive(self):
        assert parse(" [a] \n ( p & q ) ") == parse("[a](p&q)")


class TestMeasures:
    def test_degree(self):
        assert degree(p) == 0
        assert degree(box_a(conj(p, box_b(q)))) == 2
        assert degree(conj(neg(box_a(p)), box_b(p))) == 1

    def test_size(self):
        assert size(p) == 1
        assert size(neg(p)) == 2
        assert size(conj(p, neg(p))) == 4

    def test_set_measures_empty(self):
        assert FormulaSet().degree == 0
        assert FormulaSet().total_size == 0


class TestClosures:
    def test_csf_conjunction(self):
        assert csf(fset(conj(p, q))) == fset(conj(p, q), p, q)

    def test_csf_negated_conjunction(self):
        got = csf(fset(neg(conj(p, q))))
        assert got == fset(neg(conj(p, q)), neg(p), neg(q), conj(p, q), p, q)

    def test_csf_empty(self):
        assert csf(FormulaSet()) == FormulaSet()

    def test_sf_box(self):
        assert sf(fset(box_a(p))) == fset(box_a(p), p)

    def test_sf_negated_box(self):
        # the negation rule also fires on ~[b]p itself, so [b]p is included
        got = sf(fset(neg(box_b(p))))
        assert got == fset(neg(box_b(p)), box_b(p), neg(p), p)

    def test_sf_atom(self):
        assert sf(fset(p)) == fset(p)


# --- property tests -------------------------------------------------------

_names = st.sampled_from(["p", "q"])


def _formulas(max_leaves: int = 5):
    return st.recursive(
        st.one_of(_names.map(atom), st.just(FALSUM)),
        lambda kids: st.one_of(
            kids.map(neg),
            kids.map(box_a),
            kids.map(box_b),
            st.tuples(kids, kids).map(lambda lr: conj(*lr)),
        ),
        max_leaves=max_leaves,
    )


@given(_formulas())
def test_print_parse_round_trip(f):
    assert parse(print_formula(f)) == f


@given(st.frozensets(_formulas(4), max_size=5))
def test_closure_laws(items):
    w = FormulaSet(items)
    c, s = csf(w), sf(w)
    assert w <= c and c <= s
    assert csf(c) == c
    assert sf(s) == s
    if w:
        assert c.degree == w.degree


@given(st.frozensets(_formulas(4), max_size=5))
def test_canonical_order_and_hash(items):
    w1 = FormulaSet(items)
    w2 = FormulaSet(reversed(list(items)))
    assert w1 == w2 and hash(w1) == hash(w2)
    keys = [f.sort_key for f in w1]
    assert keys == sorted(keys)


def test_diamond_is_abbreviation():
    assert dia_a(p) == neg(box_a(neg(p)))
    assert print_formula(dia_a(p)) == "~[a]~p"


@given(st.text(max_size=30))
def test_parser_total_over_junk(text):
    # arbitrary input either parses or raises the positioned syntax error
    try:
        parse(text)
    except FormulaSyntaxError as err:
        assert 0 <= err.position <= len(text)
