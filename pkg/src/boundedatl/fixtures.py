"""Generators for the small separating models and the Turing-machine game."""
from __future__ import annotations

from .model import GameModel, build_model
from .turing import (
    Configuration, TuringMachine, TuringMachineError, config_word, initial_configuration,
    tm_parse, tm_run, tm_step, tm_to_icgm,
)

__all__ = [
    "fig1_model", "fig2_model", "fig3_family", "separation_formula",
    "TuringMachine", "Configuration", "TuringMachineError", "tm_parse", "tm_step",
    "tm_run", "tm_to_icgm", "config_word", "initial_configuration",
]


def fig1_model() -> GameModel:
    """Two players; matching a/b moves reach s1, mismatches stay at s0."""
    trans = {
        ("s0", ("a", "a")): "s1",
        ("s0", ("b", "b")): "s1",
        ("s0", ("a", "b")): "s0",
        ("s0", ("b", "a")): "s0",
        ("s1", ("c", "c")): "s1",
    }
    legal = {("s0", 1): "ab", ("s0", 2): "ab", ("s1", 1): "c", ("s1", 2): "c"}
    return build_model(["s0", "s1"], 2, "abc", legal, trans, {"s0": ["q"], "s1": ["p", "q"]})


def fig2_model() -> GameModel:
    """One player who must wait k-1 rounds at s0 and then go to reach p in exactly k steps."""
    states = ["s0", "s1", "s2"]
    legal = {(s, 1): ("w", "g") for s in states}
    trans = {
        ("s0", ("w",)): "s0",
        ("s0", ("g",)): "s1",
        ("s1", ("w",)): "s2",
        ("s1", ("g",)): "s2",
        ("s2", ("w",)): "s2",
        ("s2", ("g",)): "s2",
    }
    return build_model(states, 1, ("w", "g"), legal, trans, {"s1": ["p"]})


def fig3_family(k: int) -> GameModel:
    """Chain s0..sk where only the g move at sk wins; player 1 only tells s0 apart."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"fig3_family needs k >= 1, got {k!r}")
    chain = [f"s{i}" for i in range(k + 1)]
    states = chain + ["s_lose", "s_win"]
    legal = {(s, 1): ("w", "g") for s in states}
    trans = {}
    for i, s in enumerate(chain[:-1]):
        trans[s, ("w",)] = chain[i + 1]
        trans[s, ("g",)] = "s_lose"
    trans[chain[-1], ("w",)] = "s_lose"
    trans[chain[-1], ("g",)] = "s_win"
    for sink in ("s_lose", "s_win"):
        trans[sink, ("w",)] = sink
        trans[sink, ("g",)] = sink
    obs = {1: [["s0"], states[1:]]}
    return build_model(states, 1, ("w", "g"), legal, trans, {"s_win": ["p"]}, obs)


def separation_formula(k: int) -> str:
    """<<1>> X^k p in concrete syntax."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return "<<1>> " + "X " * k + "p"
