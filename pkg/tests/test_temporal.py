import random

import pytest
from hypothesis import given, settings, strategies as st

from boundedatl.fixtures import fig1_model, fig2_model, fig3_family
from boundedatl.logic import Next, Not, Or, Prop, Until, TRUE, parse_formula, size
from boundedatl.product import ProductSystem, build_product
from boundedatl.strategy import Dfst, constant_dfst
from boundedatl.temporal import (
    Objective, check_universal_ltl, check_universal_objective, exists_lasso, format_lasso,
    ltl_to_buchi, objective_for,
)
from oracles import all_paths_satisfy, lassos, ltl_on_lasso

p, q = Prop("p"), Prop("q")


def random_system(rng, n=None, props=("p", "q")):
    n = n or rng.randint(1, 8)
    succ = tuple(tuple(sorted(rng.sample(range(n), rng.randint(1, min(2, n))))) for _ in range(n))
    labels = tuple(frozenset(x for x in props if rng.random() < 0.5) for _ in range(n))
    states = tuple((f"s{i}", ()) for i in range(n))
    return ProductSystem(states, succ, labels, {"s0": 0})


def oracle_universal(ps, f, start):
    bound = len(ps.states) * (size(f) + 1)
    return all_paths_satisfy(lambda v: ps.succ[v], lambda v: ps.labels[v], start, f, min(bound, 12))


def random_ltl(rng, budget):
    if budget <= 1:
        return rng.choice([p, q, TRUE])
    kind = rng.choice(["not", "or", "next", "until"])
    if kind == "not":
        return Not(random_ltl(rng, budget - 1))
    if kind == "next":
        return Next(random_ltl(rng, budget - 1))
    left = rng.randint(1, budget - 2) if budget > 2 else 1
    a = random_ltl(rng, left)
    b = random_ltl(rng, max(1, budget - 1 - left))
    return Or(a, b) if kind == "or" else Until(a, b)


def test_lasso_oracle_sanity():
    assert ltl_on_lasso(parse_formula("G p"), [{"p"}, {"p"}], 1)
    assert not ltl_on_lasso(parse_formula("G p"), [{"p"}, set()], 0)
    assert ltl_on_lasso(parse_formula("F q"), [set(), {"q"}], 0)
    assert not ltl_on_lasso(parse_formula("F q"), [set(), set()], 1)
    assert list(lassos(lambda v: [0], 0, 1)) == [((0,), 0)]


def test_fig1_globally_q():
    ps = build_product(fig1_model(), {}, ["s0"])
    assert check_universal_objective(ps, Objective("GLOBALLY", safe=q)) == {0, 1}


def test_fig3_always_g_never_reaches_p():
    m = fig3_family(1)
    ps = build_product(m, {1: constant_dfst(m, 1, "g")}, ["s0"])
    obj = Objective("UNTIL", maintain=TRUE, goal=p)
    assert ps.initial["s0"] not in check_universal_objective(ps, obj)


def test_fig2_xxp_with_and_without_memory():
    m = fig2_model()
    win = Dfst(1, ("s0", "s1", "s2"), ((1, 0, 0), (1, 1, 1)), (("w", "w", "w"), ("g", "w", "w")))
    ps = build_product(m, {1: win}, ["s0"])
    assert check_universal_ltl(ps, parse_formula("X X p")) == {"s0": True}
    for a in ("w", "g"):
        ps = build_product(m, {1: constant_dfst(m, 1, a)}, ["s0"])
        assert check_universal_ltl(ps, parse_formula("X X p")) == {"s0": False}


def test_lasso_through_lose():
    m = fig3_family(1)
    ps = build_product(m, {1: constant_dfst(m, 1, "g")}, ["s0"])
    lasso = exists_lasso(ps, ltl_to_buchi(parse_formula("G !p")))
    assert lasso is not None
    assert ps.states[lasso.cycle[0][0]][0] == "s_lose"
    assert "s_lose" in format_lasso(ps, lasso)


def test_objective_for_shapes():
    assert objective_for(parse_formula("X p")).kind == "NEXT"
    assert objective_for(parse_formula("G p")).kind == "GLOBALLY"
    assert objective_for(parse_formula("(p U q)")).kind == "UNTIL"
    assert objective_for(parse_formula("X X p")).kind == "LTL"
    with pytest.raises(ValueError):
        objective_for(parse_formula("X <<1>> X p"))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_buchi_accepts_lasso_iff_formula_holds(seed):
    rng = random.Random(seed)
    f = random_ltl(rng, rng.randint(1, 5))
    b = ltl_to_buchi(f)
    n = rng.randint(1, 4)
    word = [frozenset(x for x in ("p", "q") if rng.random() < 0.5) for _ in range(n)]
    loop = rng.randrange(n)
    assert b.accepts_lasso(word[:loop], word[loop:]) == ltl_on_lasso(f, word, loop)


@pytest.mark.parametrize("seed", range(60))
def test_shaped_objectives_match_oracle(seed):
    rng = random.Random(seed)
    ps = random_system(rng)
    lit = [p, Not(p), q, TRUE]
    shapes = [
        (Objective("NEXT", goal=rng.choice(lit)), lambda o: Next(o.goal)),
        (Objective("GLOBALLY", safe=rng.choice(lit)), lambda o: Not(Until(TRUE, Not(o.safe)))),
        (Objective("UNTIL", maintain=rng.choice(lit), goal=rng.choice(lit)),
         lambda o: Until(o.maintain, o.goal)),
    ]
    for obj, as_ltl in shapes:
        got = check_universal_objective(ps, obj)
        for v in range(len(ps.states)):
            assert (v in got) == oracle_universal(ps, as_ltl(obj), v)


@pytest.mark.parametrize("seed", range(50))
def test_ltl_matches_oracle(seed):
    rng = random.Random(1000 + seed)
    ps = random_system(rng)
    f = random_ltl(rng, rng.randint(1, 5))
    assert check_universal_ltl(ps, f)["s0"] == oracle_universal(ps, f, 0)


def test_lasso_witness_is_genuine():
    rng = random.Random(7)
    for _ in range(40):
        ps = random_system(rng)
        f = random_ltl(rng, 4)
        lasso = exists_lasso(ps, ltl_to_buchi(f))
        if lasso is None:
            continue
        word = [ps.labels[v] for v, _ in lasso.stem + lasso.cycle]
        assert ltl_on_lasso(f, word, len(lasso.stem))
