"""Finite-memory strategies represented as deterministic finite-state transducers.

A :class:`Dfst` reads the owner's observation classes and outputs actions.
Memory state 0 is the initial memory unless ``initial`` says otherwise.  The
action chosen after a history ``h`` is ``out[run(h[:-1])][last(h)]``, where
``run`` folds the transition table over its input and returns the initial
memory for the empty input.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .model import GameModel

__all__ = [
    "Dfst",
    "StrategyError",
    "run_memory",
    "apply_strategy",
    "canonicalize",
    "enumerate_profiles",
    "enumerate_strategies",
    "format_dfst",
    "parse_dfst",
    "constant_dfst",
]


class StrategyError(ValueError):
    pass


@dataclass(frozen=True)
class Dfst:
    player: int
    classes: tuple[str, ...]
    next: tuple[tuple[int, ...], ...]
    out: tuple[tuple[str, ...], ...]
    initial: int = 0

    @property
    def size(self) -> int:
        return len(self.next)

    def class_pos(self, cls: str) -> int:
        try:
            return self.classes.index(cls)
        except ValueError:
            raise StrategyError(f"class {cls!r} is not an input of this transducer") from None


StrategyProfile = Mapping[int, Dfst]


def constant_dfst(model: GameModel, player: int, action: str | Mapping[str, str]) -> Dfst:
    """Memoryless strategy; ``action`` is one action or a map class id -> action."""
    ids = tuple(c.id for c in model.classes(player))
    if isinstance(action, str):
        row = tuple(action for _ in ids)
    else:
        row = tuple(action[c] for c in ids)
    return Dfst(player, ids, ((0,) * len(ids),), (row,))


def run_memory(d: Dfst, inputs: Sequence[str]) -> int:
    m = d.initial
    for cls in inputs:
        m = d.next[m][d.class_pos(cls)]
    return m


def apply_strategy(d: Dfst, history: Sequence[str]) -> str:
    if not history:
        raise StrategyError("empty history")
    m = run_memory(d, history[:-1])
    return d.out[m][d.class_pos(history[-1])]


def _pad(d: Dfst, size: int) -> Dfst:
    if d.size > size:
        raise StrategyError(f"transducer has {d.size} reachable states, cannot fit in {size}")
    nc = len(d.classes)
    nxt = list(d.next)
    out = list(d.out)
    for m in range(d.size, size):
        nxt.append((m,) * nc)
        out.append(d.out[0])
    return Dfst(d.player, d.classes, tuple(nxt), tuple(out), 0)


def canonicalize(d: Dfst, size: int | None = None) -> Dfst:
    """Behavioural canonical form.

    Unreachable memory is dropped, behaviourally equal memory states are merged
    (partition refinement), and the survivors are numbered in breadth-first
    order from the initial memory reading classes in declared order.  With
    ``size`` the result is padded with disconnected states up to that size.
    """
    nc = len(d.classes)
    # reachable restriction
    reach = [d.initial]
    seen = {d.initial}
    for m in reach:
        for c in range(nc):
            t = d.next[m][c]
            if t not in seen:
                seen.add(t)
                reach.append(t)
    # Moore refinement on reachable states
    block = {m: d.out[m] for m in reach}
    while True:
        sig = {m: (block[m], tuple(block[d.next[m][c]] for c in range(nc))) for m in reach}
        ids: dict = {}
        new = {m: ids.setdefault(sig[m], len(ids)) for m in reach}
        if len(ids) == len(set(block.values())):
            block = new
            break
        block = new
    # BFS numbering of blocks
    rep = {}
    for m in reach:
        rep.setdefault(block[m], m)
    order = [block[d.initial]]
    num = {order[0]: 0}
    for b in order:
        m = rep[b]
        for c in range(nc):
            tb = block[d.next[m][c]]
            if tb not in num:
                num[tb] = len(order)
                order.append(tb)
    nxt = tuple(tuple(num[block[d.next[rep[b]][c]]] for c in range(nc)) for b in order)
    out = tuple(d.out[rep[b]] for b in order)
    res = Dfst(d.player, d.classes, nxt, out, 0)
    return _pad(res, size) if size is not None else res


def _canonical_tables(n_states: int, n_classes: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Transition tables with every state reachable, numbered by first appearance."""
    total = n_states * n_classes
    cells = [0] * total

    def rec(e, top):
        if e == total:
            if top == n_states - 1:
                yield tuple(tuple(cells[m * n_classes:(m + 1) * n_classes]) for m in range(n_states))
            return
        m = e // n_classes
        if e % n_classes == 0 and m > top:
            return
        for t in range(min(top + 1, n_states - 1) + 1):
            cells[e] = t
            yield from rec(e + 1, max(top, t))

    yield from rec(0, 0)


def _is_minimal(d: Dfst) -> bool:
    return canonicalize(d).size == d.size


def enumerate_strategies(model: GameModel, player: int, k: int) -> Iterator[Dfst]:
    """All behaviourally distinct strategies with at most ``k`` memory states.

    Each is emitted once, in canonical form, padded to exactly ``k`` states.
    Order: reachable size ascending, then output table, then transition table.
    """
    if k < 1:
        raise StrategyError("memory bound must be at least 1")
    classes = model.classes(player)
    ids = tuple(c.id for c in classes)
    legal = [model.legal[c.id, player] for c in classes]
    nc = len(ids)
    for j in range(1, k + 1):
        tables = list(_canonical_tables(j, nc))
        for outs in itertools.product(*(legal * j)):
            out = tuple(tuple(outs[m * nc:(m + 1) * nc]) for m in range(j))
            for nxt in tables:
                d = Dfst(player, ids, nxt, out, 0)
                if j > 1 and not _is_minimal(d):
                    continue
                yield _pad(d, k)


def enumerate_profiles(
    model: GameModel, coalition: Sequence[int], k: int
) -> Iterator[dict[int, Dfst]]:
    """Cartesian product of :func:`enumerate_strategies`, last member varying fastest."""
    members = sorted(set(coalition))
    for j in members:
        if j not in model.players:
            raise StrategyError(f"unknown player {j}")

    def rec(i, acc):
        if i == len(members):
            yield dict(acc)
            return
        for d in enumerate_strategies(model, members[i], k):
            acc[members[i]] = d
            yield from rec(i + 1, acc)
        acc.pop(members[i], None)

    yield from rec(0, {})


def format_dfst(d: Dfst) -> str:
    lines = [f"dfst player={d.player} k={d.size}"]
    order = [d.initial] + [m for m in range(d.size) if m != d.initial]
    name = {m: f"m{i}" for i, m in enumerate(order)}
    for m in order:
        for c, cls in enumerate(d.classes):
            lines.append(f"{name[m]} {cls} -> {name[d.next[m][c]]} / {d.out[m][c]}")
    return "\n".join(lines)


def parse_dfst(text: str, model: GameModel | None = None) -> Dfst:
    """Parse the witness format written by :func:`format_dfst`."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dfst"):
        raise StrategyError("expected 'dfst player=<j> k=<n>' header")
    fields = dict(part.split("=", 1) for part in lines[0].split()[1:])
    try:
        player = int(fields["player"])
        k = int(fields["k"])
    except (KeyError, ValueError):
        raise StrategyError("bad dfst header") from None
    entries = {}
    seen_classes: list[str] = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 6 or parts[2] != "->" or parts[4] != "/":
            raise StrategyError(f"bad dfst line {ln!r}")
        m, cls, _, t, _, act = parts
        try:
            mi, ti = int(m[1:]), int(t[1:])
        except ValueError:
            raise StrategyError(f"bad memory name in {ln!r}") from None
        if not (m.startswith("m") and t.startswith("m")) or not (0 <= mi < k and 0 <= ti < k):
            raise StrategyError(f"memory state out of range in {ln!r}")
        if cls not in seen_classes:
            seen_classes.append(cls)
        entries[mi, cls] = (ti, act)
    if model is not None:
        classes = tuple(c.id for c in model.classes(player))
    else:
        classes = tuple(seen_classes)
    try:
        nxt = tuple(tuple(entries[m, c][0] for c in classes) for m in range(k))
        out = tuple(tuple(entries[m, c][1] for c in classes) for m in range(k))
    except KeyError as e:
        raise StrategyError(f"missing entry for {e.args[0]}") from None
    if model is not None:
        for c in classes:
            for m in range(k):
                if out[m][classes.index(c)] not in model.legal[c, player]:
                    raise StrategyError(f"action {out[m][classes.index(c)]} not legal on class {c}")
    return Dfst(player, classes, nxt, out, 0)
