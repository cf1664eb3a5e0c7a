"""Turing machines and their encoding as a three-player incomplete-information game.

Machines have a semi-infinite tape, never write the blank, and halt in place
in accepting states.  A configuration is played as a word: the non-blank tape
contents left to right with the control state inserted immediately before the
scanned cell (at the end when the head is past the written region).

Game outline (players 1 and 2 form the coalition, player 3 picks branches):

* ``s0`` and ``wait``: both must play ``a``.  Player 3 decides when player 1
  sees the ``I`` observation and whether player 2 sees it in the same round
  (initial-configuration check after round 1, equality check after later
  rounds) or one round later (successor check).
* ``m1_*``: the players must play the initial configuration, then ``a``.
* ``m2_*``: the players must play equal symbols forever.
* ``m3_*``: player 1's word must be a configuration and player 2's word,
  delayed by one round, its successor.  The checker keeps the last two symbols
  of player 1 and at most one unverified symbol of player 2.
* ``sink``: the only state labelled ``p``; every off-protocol move leads here.

The action ``a`` doubles as padding after a configuration word.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .model import GameModel, build_model

__all__ = [
    "TuringMachine", "Configuration", "TuringMachineError", "tm_parse", "tm_step",
    "initial_configuration", "config_word", "tm_run", "tm_to_icgm", "gadget_classes",
    "PAD",
]

PAD = "a"
_START = "^"


class TuringMachineError(ValueError):
    pass


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    alphabet: tuple[str, ...]
    blank: str
    delta: dict  # (state, symbol or blank) -> (state, symbol, "L" | "R")

    __hash__ = None


@dataclass(frozen=True)
class Configuration:
    tape: tuple[str, ...]
    head: int
    state: str


def initial_configuration(tm: TuringMachine) -> Configuration:
    return Configuration((), 0, tm.initial)


def config_word(c: Configuration) -> tuple[str, ...]:
    return c.tape[:c.head] + (c.state,) + c.tape[c.head:]


def tm_step(tm: TuringMachine, c: Configuration) -> Configuration:
    if not 0 <= c.head <= len(c.tape):
        raise TuringMachineError(f"head {c.head} outside 0..{len(c.tape)}")
    if c.state in tm.accepting:
        return c
    read = c.tape[c.head] if c.head < len(c.tape) else tm.blank
    try:
        q, write, move = tm.delta[c.state, read]
    except KeyError:
        raise TuringMachineError(f"no transition for ({c.state}, {read})") from None
    tape = list(c.tape)
    if c.head < len(tape):
        tape[c.head] = write
    else:
        tape.append(write)
    if move == "R":
        head = c.head + 1
    else:
        if c.head == 0:
            raise TuringMachineError("left move at cell 0")
        head = c.head - 1
    return Configuration(tuple(tape), head, q)


def tm_run(tm: TuringMachine, n: int) -> list[Configuration]:
    """The first ``n`` configurations, starting from the empty tape."""
    out = [initial_configuration(tm)]
    while len(out) < n:
        out.append(tm_step(tm, out[-1]))
    return out


def tm_parse(text: str, check_steps: int = 1000) -> TuringMachine:
    """Parse the machine format.

    The machine is simulated for up to ``check_steps`` steps (or until a
    configuration repeats) to report missing transitions and left moves off
    the tape; reachability of a transition is not decidable in general.
    """
    states: list[str] = []
    initial = None
    accepting: list[str] = []
    alphabet: list[str] = []
    blank = None
    rules: list = []
    header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header:
            if parts != ["tm"]:
                raise TuringMachineError(f"line {lineno}: expected header 'tm'")
            header = True
            continue
        kw, args = parts[0], parts[1:]
        if kw == "states":
            states.extend(args)
        elif kw == "initial":
            if len(args) != 1:
                raise TuringMachineError(f"line {lineno}: expected one initial state")
            initial = args[0]
        elif kw == "accept":
            accepting.extend(args)
        elif kw == "alphabet":
            alphabet.extend(args)
        elif kw == "blank":
            if len(args) != 1:
                raise TuringMachineError(f"line {lineno}: expected one blank symbol")
            blank = args[0]
        elif kw == "delta":
            if len(args) != 6 or args[2] != "->" or args[5] not in ("L", "R"):
                raise TuringMachineError(f"line {lineno}: expected 'delta q a -> q2 b L|R'")
            rules.append((lineno, args[0], args[1], args[3], args[4], args[5]))
        else:
            raise TuringMachineError(f"line {lineno}: unknown keyword {kw!r}")
    if not header:
        raise TuringMachineError("empty machine text")
    if not states:
        raise TuringMachineError("machine has no states")
    if blank is None:
        raise TuringMachineError("missing blank symbol")
    names = states + alphabet + [blank]
    if len(set(names)) != len(names):
        raise TuringMachineError("states, tape symbols and blank must all be distinct")
    if PAD in names:
        raise TuringMachineError(f"{PAD!r} is reserved for the game encoding")
    if initial not in states:
        raise TuringMachineError(f"initial state {initial!r} not declared")
    for q in accepting:
        if q not in states:
            raise TuringMachineError(f"accepting state {q!r} not declared")
    delta = {}
    for lineno, q, r, q2, w, mv in rules:
        if q not in states or q2 not in states:
            raise TuringMachineError(f"line {lineno}: undeclared state")
        if r != blank and r not in alphabet:
            raise TuringMachineError(f"line {lineno}: undeclared symbol {r}")
        if w == blank:
            raise TuringMachineError(f"line {lineno}: machine writes the blank symbol")
        if w not in alphabet:
            raise TuringMachineError(f"line {lineno}: undeclared symbol {w}")
        if (q, r) in delta:
            raise TuringMachineError(f"line {lineno}: duplicate rule for ({q}, {r})")
        delta[q, r] = (q2, w, mv)
    tm = TuringMachine(tuple(states), initial, frozenset(accepting), tuple(alphabet), blank, delta)
    c = initial_configuration(tm)
    seen = {c}
    for _ in range(check_steps):
        c = tm_step(tm, c)
        if c in seen:
            break
        seen.add(c)
    return tm


# -- game encoding -------------------------------------------------------------

def _predict(tm, window):
    """Expected successor-word symbol at position ``i`` given the current word's
    symbols at ``i-1, i, i+1, i+2`` (``^`` before the word, ``a`` after it).
    Returns None when no successor symbol fits."""
    Q = set(tm.states)
    before, cur, after, after2 = window

    def cell(x):
        return tm.blank if x == PAD else x

    if before in Q:
        q, c, off = before, cur, -1
    elif cur in Q:
        q, c, off = cur, after, 0
    elif after in Q:
        q, c, off = after, after2, 1
    else:
        return cur
    if q in tm.accepting:
        return cur
    rule = tm.delta.get((q, cell(c)))
    if rule is None:
        return None
    q2, b, mv = rule
    if off == -1:
        return q2 if mv == "R" else b
    if off == 0:
        if mv == "R":
            return b
        return None if before == _START else before
    return cur if mv == "R" else q2


class _Checker:
    """Successor checker as a deterministic automaton over symbol pairs.

    A state ``(phase, prev, cur, pending, seen)`` holds the last two symbols
    of player 1's word, player 2's symbol still awaiting lookahead (with the
    symbol before it), and whether a control state has appeared.
    """

    def __init__(self, tm, acts):
        self.tm = tm
        self.Q = set(tm.states)
        self.acts = acts

    def first(self, x1, x2):
        if x2 != PAD or x1 == PAD:
            return None
        return ("first", _START, x1, None, x1 in self.Q)

    def step(self, st, x1, x2):
        """``x1`` extends player 1's word; ``x2`` is player 2's symbol at ``cur``'s position."""
        _, prev, cur, pending, seen = st
        Q = self.Q
        if cur == PAD and x1 != PAD:
            return None
        if x1 in Q and seen:
            return None
        if x1 == PAD and not seen:
            return None
        if pending is not None:
            sym, before = pending
            if _predict(self.tm, (before, prev, cur, x1)) != sym:
                return None
        if x1 in Q:
            cands = {_predict(self.tm, (prev, cur, x1, nxt)) for nxt in self.acts if nxt not in Q}
            cands.discard(None)
            if x2 not in cands:
                return None
            new_pending = None if len(cands) == 1 else (x2, prev)
        else:
            if _predict(self.tm, (prev, cur, x1, None)) != x2:
                return None
            new_pending = None
        return ("later", cur, x1, new_pending, seen or x1 in Q)


def _checker_states(tm, acts):
    """Reachable checker states after the entry round plus the transition table."""
    chk = _Checker(tm, acts)
    table = {}
    start = {}
    todo = []
    for x1, x2 in itertools.product(acts, acts):
        st = chk.first(x1, x2)
        start[x1, x2] = st
        if st is not None and st not in table:
            table[st] = None
            todo.append(st)
    while todo:
        st = todo.pop()
        row = {}
        for x1, x2 in itertools.product(acts, acts):
            nx = chk.step(st, x1, x2)
            row[x1, x2] = nx
            if nx is not None and nx not in table:
                table[nx] = None
                todo.append(nx)
        table[st] = row
    return start, table


def _minimize(start, table, acts):
    """Merge equivalent checker states; 'first' states stay apart from 'later' ones."""
    states = list(table)
    block = {s: s[0] for s in states}
    pairs = list(itertools.product(acts, acts))
    while True:
        sig = {
            s: (block[s], tuple(block[table[s][p]] if table[s][p] is not None else None
                                for p in pairs))
            for s in states
        }
        ids: dict = {}
        new = {s: ids.setdefault(sig[s], len(ids)) for s in states}
        if len(ids) == len(set(block.values())):
            block = new
            break
        block = new
    return block


def tm_to_icgm(tm: TuringMachine) -> GameModel:
    """Encode ``tm`` so that <<1,2>> G !p holds at s0 under finite memory iff the
    run of ``tm`` repeats a configuration."""
    acts = [PAD] + list(tm.alphabet) + list(tm.states)
    # the checker alphabet needs the word ``a`` to read the blank
    start, table = _checker_states(tm, acts)
    block = _minimize(start, table, acts)
    first_blocks = sorted({block[s] for s in table if s[0] == "first"})
    later_blocks = sorted({block[s] for s in table if s[0] == "later"})
    order = first_blocks + later_blocks
    name = {b: f"m3_{i}" for i, b in enumerate(order)}
    rep = {}
    for s in table:
        rep.setdefault(block[s], s)

    states = ["s0", "wait", "m1_init", "m1_pad", "m2_start", "m2_eq", "m3_start"]
    states += [name[b] for b in order]
    states.append("sink")
    p3 = ["wait", "go1", "go2", "go3", "nop"]
    actions = acts + [x for x in p3 if x not in acts]
    legal = {}
    for s in states:
        legal[s, 1] = acts
        legal[s, 2] = acts
        legal[s, 3] = ["nop"]
    legal["s0", 3] = ["wait", "go1", "go3"]
    legal["wait", 3] = ["wait", "go2", "go3"]

    trans = {}
    branch = {"wait": "wait", "go1": "m1_init", "go2": "m2_start", "go3": "m3_start"}
    for s in states:
        for x1, x2 in itertools.product(acts, acts):
            for c in legal[s, 3]:
                key = (s, (x1, x2, c))
                if s in ("s0", "wait"):
                    t = branch[c] if (x1, x2) == (PAD, PAD) else "sink"
                elif s == "m1_init":
                    t = "m1_pad" if (x1, x2) == (tm.initial, tm.initial) else "sink"
                elif s == "m1_pad":
                    t = "m1_pad" if (x1, x2) == (PAD, PAD) else "sink"
                elif s in ("m2_start", "m2_eq"):
                    t = "m2_eq" if x1 == x2 else "sink"
                elif s == "m3_start":
                    nx = start[x1, x2]
                    t = name[block[nx]] if nx is not None else "sink"
                elif s == "sink":
                    t = "sink"
                else:
                    b = next(bb for bb, nm in name.items() if nm == s)
                    nx = table[rep[b]][x1, x2]
                    t = name[block[nx]] if nx is not None else "sink"
                trans[key] = t

    first_names = [name[b] for b in first_blocks]
    obs1_I = ["m1_init", "m2_start", "m3_start"]
    obs2_I = ["m1_init", "m2_start"] + first_names
    rest1 = [s for s in states if s not in obs1_I and s != "s0"]
    rest2 = [s for s in states if s not in obs2_I and s != "s0"]
    obs = {1: [["s0"], rest1, obs1_I], 2: [["s0"], rest2, obs2_I]}
    return build_model(states, 3, actions, legal, trans, {"sink": ["p"]}, obs)


def gadget_classes(model: GameModel, player: int) -> dict[str, str]:
    """Class ids of the observations ``0``, ``.`` and ``I`` for player 1 or 2."""
    zero = model.class_id(player, "s0")
    dot = model.class_id(player, "wait")
    eye = model.class_id(player, "m1_init")
    return {"0": zero, ".": dot, "I": eye}
