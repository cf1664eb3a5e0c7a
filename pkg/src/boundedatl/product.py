"""Transition system of a game restricted by a coalition's finite-memory profile.

States are pairs ``(game state, memory tuple)`` with the memory tuple ordered
by ascending coalition member.  Only states reachable from the initial pairs
are built; the same system serves every start state.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import GameModel
from .strategy import Dfst, StrategyError, apply_strategy

__all__ = ["ProductSystem", "build_product", "outcome_correspondence_check", "Arena"]


@dataclass(frozen=True)
class ProductSystem:
    states: tuple[tuple[str, tuple[int, ...]], ...]
    succ: tuple[tuple[int, ...], ...]
    labels: tuple[frozenset[str], ...]
    initial: Mapping[str, int]  # start game state -> product index

    __hash__ = None

    def dump(self) -> str:
        lines = [f"pstate {s} {','.join(map(str, m))}" for s, m in self.states]
        for i, ts in enumerate(self.succ):
            lines.extend(f"pedge {i} -> {t}" for t in ts)
        return "\n".join(lines)


class Arena:
    """Successor lookup for a fixed coalition: ``moves[s][coalition actions]``."""

    def __init__(self, model: GameModel, coalition: Iterable[int]):
        self.model = model
        self.coalition = tuple(sorted(set(coalition)))
        self.moves: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
        for s in model.states:
            table: dict[tuple[str, ...], list[str]] = {}
            for m in model.moves(s):
                key = tuple(m[j - 1] for j in self.coalition)
                t = model.trans[s, m]
                lst = table.setdefault(key, [])
                if t not in lst:
                    lst.append(t)
            order = model.state_index
            self.moves[s] = {k: tuple(sorted(v, key=order.__getitem__)) for k, v in table.items()}


def _check_profile(model, profile, coalition):
    for j in coalition:
        d = profile[j]
        ids = tuple(c.id for c in model.classes(j))
        if d.classes != ids:
            raise StrategyError(f"strategy of player {j} reads {d.classes}, model classes are {ids}")
        for c, cls in enumerate(ids):
            for m in range(d.size):
                if d.out[m][c] not in model.legal[cls, j]:
                    raise StrategyError(f"player {j} plays illegal {d.out[m][c]} on class {cls}")


def build_product(
    model: GameModel,
    profile: Mapping[int, Dfst],
    starts: Iterable[str],
    labels: Mapping[str, frozenset[str]] | None = None,
) -> ProductSystem:
    starts = list(dict.fromkeys(starts))
    if not starts:
        raise ValueError("no start states")
    coalition = tuple(sorted(profile))
    _check_profile(model, profile, coalition)
    labels = model.labels if labels is None else labels
    arena = Arena(model, coalition)
    dfsts = [profile[j] for j in coalition]
    cls_pos = [
        {s: model.class_index(j, s) for s in model.states} for j in coalition
    ]
    index: dict = {}
    states: list = []
    succ: list = []
    initial = {}
    m0 = tuple(d.initial for d in dfsts)
    for s in starts:
        q = (s, m0)
        if q not in index:
            index[q] = len(states)
            states.append(q)
        initial[s] = index[q]
    i = 0
    while i < len(states):
        s, mem = states[i]
        acts = tuple(d.out[m][cls_pos[n][s]] for n, (d, m) in enumerate(zip(dfsts, mem)))
        nmem = tuple(d.next[m][cls_pos[n][s]] for n, (d, m) in enumerate(zip(dfsts, mem)))
        row = []
        for t in arena.moves[s][acts]:
            q = (t, nmem)
            if q not in index:
                index[q] = len(states)
                states.append(q)
            row.append(index[q])
        succ.append(tuple(row))
        i += 1
    return ProductSystem(
        tuple(states),
        tuple(succ),
        tuple(frozenset(labels.get(s, ())) for s, _ in states),
        initial,
    )


def _oracle_outcomes(model, profile, start, depth):
    """Outcome prefixes of ``depth`` states by direct simulation of the strategies."""
    coalition = sorted(profile)
    results = set()

    def rec(hist):
        if len(hist) == depth:
            results.add(tuple(hist))
            return
        s = hist[-1]
        fixed = {
            j: apply_strategy(profile[j], [model.class_id(j, h) for h in hist]) for j in coalition
        }
        choices = [
            (fixed[j],) if j in fixed else model.legal[s, j] for j in model.players
        ]
        targets = {model.trans[s, m] for m in itertools.product(*choices)}
        for t in sorted(targets):
            rec(hist + [t])

    rec([start])
    return results


def outcome_correspondence_check(
    model: GameModel, profile: Mapping[int, Dfst], product: ProductSystem, depth: int
) -> bool:
    """Compare product paths with brute-force strategy outcomes up to ``depth`` states."""
    for start, q0 in product.initial.items():
        paths = set()
        frontier = [(q0, (product.states[q0][0],))]
        while frontier:
            q, path = frontier.pop()
            if len(path) == depth:
                paths.add(path)
                continue
            for t in product.succ[q]:
                frontier.append((t, path + (product.states[t][0],)))
        if paths != _oracle_outcomes(model, profile, start, depth):
            return False
    return True
