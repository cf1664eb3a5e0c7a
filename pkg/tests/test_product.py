import random

import pytest

from boundedatl.fixtures import fig1_model, fig2_model, fig3_family
from boundedatl.product import build_product, outcome_correspondence_check
from boundedatl.strategy import Dfst, StrategyError, constant_dfst, enumerate_profiles
from corpus import random_model


def wait_then_go():
    return Dfst(1, ("s0", "s1", "s2"), ((1, 0, 0), (1, 1, 1)), (("w", "w", "w"), ("g", "w", "w")))


def test_empty_profile_is_the_game_graph():
    ps = build_product(fig1_model(), {}, ["s0"])
    assert ps.states == (("s0", ()), ("s1", ()))
    assert ps.succ == ((0, 1), (1,))
    assert ps.labels == (frozenset({"q"}), frozenset({"p", "q"}))


def test_fig2_single_outcome():
    ps = build_product(fig2_model(), {1: wait_then_go()}, ["s0"])
    path = [ps.initial["s0"]]
    for _ in range(4):
        (nxt,) = ps.succ[path[-1]]
        path.append(nxt)
    assert [ps.states[q] for q in path] == [
        ("s0", (0,)), ("s0", (1,)), ("s1", (1,)), ("s2", (1,)), ("s2", (1,)),
    ]


def test_fig3_always_g_goes_to_lose():
    m = fig3_family(1)
    ps = build_product(m, {1: constant_dfst(m, 1, "g")}, ["s0"])
    assert [ps.states[t] for t in ps.succ[ps.initial["s0"]]] == [("s_lose", (0,))]


def test_shared_system_for_several_starts():
    m = fig3_family(2)
    ps = build_product(m, {1: constant_dfst(m, 1, "w")}, ["s0", "s1"])
    assert set(ps.initial) == {"s0", "s1"}
    assert len(set(ps.states)) == len(ps.states)


def test_errors():
    m = fig2_model()
    with pytest.raises(ValueError):
        build_product(m, {1: wait_then_go()}, [])
    bad = Dfst(1, ("s0",), ((0,),), (("w",),))
    with pytest.raises(StrategyError):
        build_product(m, {1: bad}, ["s0"])


def test_coalition_actions_are_unique_per_product_state():
    m = fig1_model()
    for prof in enumerate_profiles(m, [1], 2):
        ps = build_product(m, prof, ["s0", "s1"])
        d = prof[1]
        for q, (s, (mem,)) in enumerate(ps.states):
            act = d.out[mem][m.class_index(1, s)]
            targets = {m.trans[s, mv] for mv in m.moves(s) if mv[0] == act}
            assert {ps.states[t][0] for t in ps.succ[q]} == targets


def test_correspondence_examples():
    assert outcome_correspondence_check(fig2_model(), {1: wait_then_go()},
                                        build_product(fig2_model(), {1: wait_then_go()}, ["s0"]), 4)
    ps = build_product(fig1_model(), {}, ["s0"])
    assert outcome_correspondence_check(fig1_model(), {}, ps, 3)
    assert outcome_correspondence_check(fig1_model(), {}, ps, 1)


def test_correspondence_detects_a_wrong_product():
    m = fig2_model()
    good = build_product(m, {1: wait_then_go()}, ["s0"])
    other = build_product(m, {1: constant_dfst(m, 1, "g")}, ["s0"])
    assert not outcome_correspondence_check(m, {1: wait_then_go()}, other, 3)
    assert outcome_correspondence_check(m, {1: wait_then_go()}, good, 3)


@pytest.mark.parametrize("seed", range(20))
def test_size_bound_and_correspondence_on_random_models(seed):
    rng = random.Random(seed)
    m = random_model(rng, max_states=3, incomplete=seed % 2 == 0)
    profiles = list(enumerate_profiles(m, [1], 2))
    prof = rng.choice(profiles)
    ps = build_product(m, prof, list(m.states))
    assert len(ps.states) <= len(m.states) * 2
    assert all(ps.succ[q] for q in range(len(ps.states)))
    assert outcome_correspondence_check(m, prof, ps, len(ps.states) + 1)
