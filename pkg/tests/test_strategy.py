import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from boundedatl.fixtures import fig1_model, fig2_model, fig3_family
from boundedatl.model import build_model
from boundedatl.strategy import (
    Dfst, StrategyError, apply_strategy, canonicalize, constant_dfst, enumerate_profiles,
    enumerate_strategies, format_dfst, parse_dfst, run_memory,
)
from oracles import all_tables

CHAIN_CLASSES = ("s0", "s1", "s2")


def wait_then_go():
    # w at m0 then move to m1, g at m1
    return Dfst(1, CHAIN_CLASSES, ((1, 0, 0), (1, 1, 1)), (("w", "w", "w"), ("g", "w", "w")))


def histories(classes, max_len):
    for n in range(1, max_len + 1):
        yield from itertools.product(classes, repeat=n)


def behaviour(d, max_len):
    return tuple(apply_strategy(d, h) for h in histories(d.classes, max_len))


def test_run_memory_conventions():
    d = wait_then_go()
    assert run_memory(d, []) == 0
    assert run_memory(d, ["s0"]) == 1
    assert run_memory(constant_dfst(fig2_model(), 1, "w"), ["s0", "s1", "s2"]) == 0


def test_run_memory_rejects_unknown_class():
    with pytest.raises(StrategyError):
        run_memory(wait_then_go(), ["s9"])


def test_apply_strategy_examples():
    d = wait_then_go()
    assert apply_strategy(d, ["s0"]) == "w"
    assert apply_strategy(d, ["s0", "s0"]) == "g"
    assert apply_strategy(d, ["s0", "s0", "s0"]) == "g"
    w = constant_dfst(fig2_model(), 1, "w")
    assert all(apply_strategy(w, h) == "w" for h in histories(CHAIN_CLASSES, 3))


def test_apply_strategy_rejects_empty_history():
    with pytest.raises(StrategyError):
        apply_strategy(wait_then_go(), [])


def test_memoryless_depends_on_last_class_only():
    for d in enumerate_strategies(fig2_model(), 1, 1):
        for h in histories(CHAIN_CLASSES, 3):
            assert apply_strategy(d, h) == apply_strategy(d, h[-1:])


def test_fig2_memoryless_count():
    profiles = list(enumerate_profiles(fig2_model(), [1], 1))
    assert len(profiles) == 8


def test_empty_coalition_single_profile():
    assert list(enumerate_profiles(fig1_model(), [], 3)) == [{}]


def test_fig3_profiles_are_padded_and_canonical():
    m = fig3_family(1)
    for prof in enumerate_profiles(m, [1], 2):
        d = prof[1]
        assert d.size == 2
        assert canonicalize(d, 2) == d


def test_enumeration_is_deterministic():
    m = fig1_model()
    a = list(enumerate_profiles(m, [1, 2], 2))
    b = list(enumerate_profiles(m, [1, 2], 2))
    assert a == b
    # last member varies fastest
    assert a[0][1] == a[1][1] and a[0][2] != a[1][2]


def test_unknown_player():
    with pytest.raises(StrategyError):
        list(enumerate_profiles(fig1_model(), [3], 1))


def tiny_models():
    one = fig2_model()
    # two classes, two actions, incomplete information
    two = build_model(
        ["a", "b", "c"], 1, ["x", "y"],
        {(s, 1): ("x", "y") for s in "abc"},
        {(s, (act,)): t for s in "abc" for act, t in (("x", "a"), ("y", "c"))},
        {}, {1: [["a"], ["b", "c"]]},
    )
    return [one, two]


# three classes at k=2 are covered on shorter histories below
@pytest.mark.parametrize("idx,k", [(0, 1), (1, 1), (1, 2)])
def test_enumeration_complete_against_raw_tables(idx, k):
    m = tiny_models()[idx]
    enumerated = {behaviour(d, 3) for d in enumerate_strategies(m, 1, k)}
    raw = {behaviour(d, 3) for d in all_tables(m, 1, k)}
    assert enumerated == raw


def test_enumeration_complete_fig2_k2_on_short_histories():
    m = fig2_model()
    enumerated = {behaviour(d, 2) for d in enumerate_strategies(m, 1, 2)}
    raw = {behaviour(d, 2) for d in all_tables(m, 1, 2)}
    assert enumerated == raw


def test_enumeration_emits_no_behavioural_duplicates():
    m = tiny_models()[1]
    seen = [behaviour(d, 5) for d in enumerate_strategies(m, 1, 3)]
    assert len(seen) == len(set(seen))


# -- canonical form ------------------------------------------------------------

def random_dfst(rng, n_states, classes=("c0", "c1"), actions=("x", "y")):
    nxt = tuple(tuple(rng.randrange(n_states) for _ in classes) for _ in range(n_states))
    out = tuple(tuple(rng.choice(actions) for _ in classes) for _ in range(n_states))
    return Dfst(1, classes, nxt, out, rng.randrange(n_states))


def permuted(d, perm):
    inv = {perm[i]: i for i in range(d.size)}
    nxt = tuple(tuple(perm[t] for t in d.next[inv[m]]) for m in range(d.size))
    out = tuple(d.out[inv[m]] for m in range(d.size))
    return Dfst(d.player, d.classes, nxt, out, perm[d.initial])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_canonicalize_invariants(seed, n):
    rng = random.Random(seed)
    d = random_dfst(rng, n)
    c = canonicalize(d)
    horizon = n * 2 + 1
    assert behaviour(c, horizon) == behaviour(d, horizon)
    assert canonicalize(c) == c
    perm = list(range(n))
    rng.shuffle(perm)
    assert canonicalize(permuted(d, perm)) == c


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
def test_behaviourally_equal_dfsts_share_canonical_form(seed, n1, n2):
    rng = random.Random(seed)
    a, b = random_dfst(rng, n1), random_dfst(rng, n2)
    horizon = max(n1, n2) * 2 + 1
    if behaviour(a, horizon) == behaviour(b, horizon):
        assert canonicalize(a) == canonicalize(b)
    else:
        assert canonicalize(a) != canonicalize(b)


def test_disconnected_state_is_dropped_and_padding_restores_size():
    d = wait_then_go()
    extra = Dfst(1, d.classes, d.next + ((2, 2, 2),), d.out + (("g", "g", "g"),))
    assert canonicalize(extra) == canonicalize(d)
    padded = canonicalize(d, 3)
    assert padded.size == 3
    assert behaviour(padded, 4) == behaviour(d, 4)


def test_one_state_is_its_own_canonical_form():
    d = constant_dfst(fig2_model(), 1, "g")
    assert canonicalize(d) == d


def test_monotone_padding_of_enumerated_strategies():
    m = tiny_models()[1]
    for k in (1, 2):
        bigger = {behaviour(d, 4) for d in enumerate_strategies(m, 1, k + 1)}
        for d in enumerate_strategies(m, 1, k):
            assert behaviour(d, 4) in bigger


# -- witness format --------------------------------------------------------------

def test_format_example():
    assert format_dfst(wait_then_go()).splitlines()[:3] == [
        "dfst player=1 k=2",
        "m0 s0 -> m1 / w",
        "m0 s1 -> m0 / w",
    ]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_format_round_trips_behaviour(seed, n):
    d = random_dfst(random.Random(seed), n)
    back = parse_dfst(format_dfst(d))
    assert behaviour(back, 4) == behaviour(d, 4)


def test_parse_rejects_garbage():
    with pytest.raises(StrategyError):
        parse_dfst("nonsense")
    with pytest.raises(StrategyError):
        parse_dfst("dfst player=1 k=1\nm0 s0 -> m3 / w")
