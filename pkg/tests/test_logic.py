import pytest
from hypothesis import given, settings, strategies as st

from boundedatl.logic import (
    FALSE, TRUE, Coalition, Const, FormulaSyntaxError, Fragment, Next, Not, Or, Prop, Until,
    atl_shape, classify, conj, eventually, globally, parse_formula, polarity, props_of,
    strategic_subformulas, substitute, to_text,
)

p, q = Prop("p"), Prop("q")


def test_parse_examples():
    assert parse_formula("<<1,2>> G !p") == Coalition((1, 2), globally(Not(p)))
    assert parse_formula("<<1>> X X p") == Coalition((1,), Next(Next(p)))
    assert parse_formula("p") == p


def test_derived_connectives_desugar():
    assert parse_formula("p & q") == Not(Or(Not(p), Not(q)))
    assert parse_formula("p -> q") == Or(Not(p), q)
    assert parse_formula("F p") == Until(TRUE, p)
    assert parse_formula("G p") == Not(Until(TRUE, Not(p)))
    assert parse_formula("<<>> G q") == Coalition((), globally(q))


def test_precedence():
    assert parse_formula("p | q & p") == Or(p, conj(q, p))
    assert parse_formula("!p | q") == Or(Not(p), q)
    assert parse_formula("X p | q") == Or(Next(p), q)
    assert parse_formula("p -> q -> p") == parse_formula("p -> (q -> p)")


def test_coalition_players_are_sorted_and_deduplicated():
    assert parse_formula("<<2,1,2>> X p").players == (1, 2)


@pytest.mark.parametrize("bad", ["p &", "p U q", "(p U", "<<1> X p", "<<0>> X p", "", "p q", "@1"])
def test_syntax_errors(bad):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(bad)


def test_fresh_props_only_when_allowed():
    assert parse_formula("@1 | p", allow_fresh=True) == Or(Prop("@1"), p)


def test_classify_examples():
    assert classify(parse_formula("<<1>> F p")) == Fragment.ATL0
    assert classify(parse_formula("<<1>> X X p")) == Fragment.ATL0_STAR
    assert classify(parse_formula("p | !q")) == Fragment.PROPOSITIONAL
    assert classify(parse_formula("X p")) == Fragment.LTL
    assert classify(parse_formula("<<1>> F <<2>> G p")) == Fragment.ATL
    assert classify(parse_formula("<<1>> X <<2>> (p U X q)")) == Fragment.ATL_STAR
    # a negated quantifier is no longer a single outermost quantifier
    assert classify(parse_formula("!<<1>> X p")) == Fragment.ATL


def test_atl_shapes():
    assert atl_shape(parse_formula("X p")) == ("X", p)
    assert atl_shape(parse_formula("G p")) == ("G", p)
    assert atl_shape(parse_formula("(p U q)")) == ("U", p, q)
    # the shape is structural; arguments are checked by the caller
    assert atl_shape(parse_formula("X X p")) == ("X", Next(p))
    assert atl_shape(parse_formula("X p | q")) is None


def test_strategic_subformulas_examples():
    f = parse_formula("<<1>> F <<2>> G p")
    inner = parse_formula("<<2>> G p")
    assert strategic_subformulas(f) == [inner, f]
    assert strategic_subformulas(parse_formula("(p U q)")) == []
    assert strategic_subformulas(parse_formula("!<<1>> X p")) == [parse_formula("<<1>> X p")]


def test_substitute_examples():
    f = parse_formula("<<1>> F <<2>> G p")
    assert substitute(f, parse_formula("<<2>> G p"), "@1") == parse_formula(
        "<<1>> F @1", allow_fresh=True)
    assert substitute(p, p, "@1") == Prop("@1")
    g = parse_formula("<<1>> X p | <<1>> X p")
    assert substitute(g, parse_formula("<<1>> X p"), "@1") == Or(Prop("@1"), Prop("@1"))


def test_substitute_rejects_clash_and_absent_target():
    with pytest.raises(ValueError):
        substitute(Or(p, Prop("@1")), p, "@1")
    with pytest.raises(ValueError):
        substitute(p, q, "@1")


def test_polarity():
    assert polarity(parse_formula("p | !q"), "p") == {True}
    assert polarity(parse_formula("p | !q"), "q") == {False}
    assert polarity(parse_formula("(p U !p)"), "p") == {True, False}


# -- round trip ----------------------------------------------------------------

def formulas(max_leaves=12):
    leaves = st.one_of(st.sampled_from([p, q, Prop("r")]), st.sampled_from([TRUE, FALSE]))

    def extend(children):
        players = st.lists(st.integers(1, 3), max_size=3).map(lambda xs: tuple(sorted(set(xs))))
        return st.one_of(
            children.map(Not),
            st.tuples(children, children).map(lambda t: Or(*t)),
            children.map(Next),
            st.tuples(children, children).map(lambda t: Until(*t)),
            st.tuples(players, children).map(lambda t: Coalition(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_to_text_round_trips(f):
    assert parse_formula(to_text(f)) == f


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_subformula_order_is_innermost_first(f):
    subs = strategic_subformulas(f)
    for i, g in enumerate(subs):
        for inner in strategic_subformulas(g.body):
            assert subs.index(inner) < i


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_props_of_matches_text(f):
    for name in props_of(f):
        assert name in to_text(f)


def test_helpers_build_desugared_forms():
    assert eventually(p) == parse_formula("F p")
    assert globally(p) == parse_formula("G p")
    assert conj(p, q) == parse_formula("p & q")
    assert isinstance(TRUE, Const) and TRUE.value
