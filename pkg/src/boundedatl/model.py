"""Concurrent game models with complete and incomplete information.

A model is immutable once built.  Players are numbered ``1..n``; states and
actions are plain string identifiers kept in declaration order.  Omitting the
observation partition of a player gives that player complete information
(identity partition).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

__all__ = [
    "GameModel",
    "ModelError",
    "ObservationClass",
    "parse_model",
    "serialize_model",
    "validate",
    "observation_class",
    "successors",
]

IDENT = re.compile(r"^[^\s(),#{}]+$")


class ModelError(ValueError):
    """Raised for malformed model text or inconsistent model data."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class ObservationClass:
    player: int
    members: tuple[str, ...]
    id: str  # first member in state declaration order


@dataclass(frozen=True, eq=True)
class GameModel:
    states: tuple[str, ...]
    n_players: int
    actions: tuple[str, ...]
    legal: Mapping[tuple[str, int], tuple[str, ...]]
    trans: Mapping[tuple[str, tuple[str, ...]], str]
    labels: Mapping[str, frozenset[str]]
    obs: Mapping[int, tuple[tuple[str, ...], ...]] = field(default_factory=dict)

    __hash__ = None  # dict-valued fields

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_players + 1))

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    def partition(self, player: int) -> tuple[tuple[str, ...], ...]:
        """Observation classes of ``player``; identity when none were given."""
        if player in self.obs:
            return self.obs[player]
        return tuple((s,) for s in self.states)

    @cached_property
    def is_complete_information(self) -> bool:
        return all(all(len(block) == 1 for block in self.partition(j)) for j in self.players)

    @cached_property
    def _class_maps(self) -> dict[int, dict[str, int]]:
        maps = {}
        for j in self.players:
            m = {}
            for ci, block in enumerate(self.partition(j)):
                for s in block:
                    m[s] = ci
            maps[j] = m
        return maps

    def classes(self, player: int) -> tuple[ObservationClass, ...]:
        return tuple(
            ObservationClass(player, tuple(block), block[0]) for block in self.partition(player)
        )

    def class_index(self, player: int, state: str) -> int:
        return self._class_maps[player][state]

    def class_id(self, player: int, state: str) -> str:
        return self.partition(player)[self.class_index(player, state)][0]

    def props(self) -> frozenset[str]:
        out = set()
        for ps in self.labels.values():
            out |= ps
        return frozenset(out)

    def with_labels(self, labels: Mapping[str, frozenset[str]]) -> "GameModel":
        return GameModel(
            self.states, self.n_players, self.actions, self.legal, self.trans,
            dict(labels), self.obs,
        )

    def moves(self, state: str) -> list[tuple[str, ...]]:
        return list(itertools.product(*(self.legal[state, j] for j in self.players)))


def observation_class(model: GameModel, player: int, state: str) -> ObservationClass:
    if player not in model.players:
        raise ModelError(f"unknown player {player}")
    if state not in model.state_index:
        raise ModelError(f"unknown state {state!r}")
    block = model.partition(player)[model.class_index(player, state)]
    return ObservationClass(player, tuple(block), block[0])


def successors(model: GameModel, state: str) -> list[tuple[tuple[str, ...], str]]:
    if state not in model.state_index:
        raise ModelError(f"unknown state {state!r}")
    return [(m, model.trans[state, m]) for m in model.moves(state)]


def validate(model: GameModel) -> list[str]:
    """Return every violated model invariant as a readable message."""
    problems = []
    states = set(model.states)
    if not model.states:
        problems.append("model has no states")
    if model.n_players < 1:
        problems.append("model has no players")
    if len(states) != len(model.states):
        problems.append("duplicate state identifiers")
    actions = set(model.actions)
    for s in model.states:
        for j in model.players:
            acts = model.legal.get((s, j), ())
            if not acts:
                problems.append(f"empty legal set for player {j} at {s}")
            for a in acts:
                if a not in actions:
                    problems.append(f"undeclared action {a} legal for player {j} at {s}")
    expected = set()
    for s in model.states:
        if all(model.legal.get((s, j)) for j in model.players):
            for m in model.moves(s):
                expected.add((s, m))
                if (s, m) not in model.trans:
                    problems.append(f"missing transition at {s} for move ({','.join(m)})")
    for (s, m), t in model.trans.items():
        if (s, m) not in expected:
            problems.append(f"transition at {s} for illegal move ({','.join(m)})")
        if t not in states:
            problems.append(f"transition at {s} targets unknown state {t}")
    for s in model.labels:
        if s not in states:
            problems.append(f"label on unknown state {s}")
    for j, blocks in model.obs.items():
        if j not in model.players:
            problems.append(f"observation partition for unknown player {j}")
            continue
        seen = {}
        for block in blocks:
            if not block:
                problems.append(f"empty observation class for player {j}")
            for s in block:
                if s not in states:
                    problems.append(f"observation class of player {j} names unknown state {s}")
                elif s in seen:
                    problems.append(f"partition of player {j} lists {s} twice")
                seen[s] = block
        for s in model.states:
            if s not in seen:
                problems.append(f"partition of player {j} does not cover {s}")
        for block in blocks:
            known = [s for s in block if s in states]
            for s in known[1:]:
                if set(model.legal.get((s, j), ())) != set(model.legal.get((known[0], j), ())):
                    problems.append(
                        f"player {j} cannot distinguish {known[0]} and {s} "
                        f"but their legal actions differ"
                    )
    return problems


def _tokens(line: str) -> list[tuple[str, int]]:
    out = []
    for m in re.finditer(r"\(|\)|\{|\}|,|[^\s(),{}]+", line):
        out.append((m.group(), m.start() + 1))
    return out


def parse_model(text: str, check: bool = True) -> GameModel:
    """Parse the line-oriented model format.

    With ``check`` (the default) the model is also validated and the first
    violation raised as :class:`ModelError`.
    """
    n_players = None
    actions: list[str] = []
    states: list[str] = []
    labels: dict[str, frozenset[str]] = {}
    legal: dict[tuple[str, int], tuple[str, ...]] = {}
    trans: dict[tuple[str, tuple[str, ...]], str] = {}
    obs: dict[int, tuple[tuple[str, ...], ...]] = {}
    header_seen = False

    def ident(tok, lineno):
        word, col = tok
        if not IDENT.match(word):
            raise ModelError(f"bad identifier {word!r}", lineno, col)
        return word

    def need_state(tok, lineno):
        if tok[0] not in labels:
            raise ModelError(f"undeclared state {tok[0]}", lineno, tok[1])
        return tok[0]

    def need_player(tok, lineno):
        if n_players is None:
            raise ModelError("players must be declared first", lineno, tok[1])
        try:
            j = int(tok[0])
        except ValueError:
            raise ModelError(f"bad player index {tok[0]!r}", lineno, tok[1]) from None
        if not 1 <= j <= n_players:
            raise ModelError(f"undeclared player {j}", lineno, tok[1])
        return j

    def need_action(tok, lineno):
        if tok[0] not in actions:
            raise ModelError(f"undeclared action {tok[0]}", lineno, tok[1])
        return tok[0]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = _tokens(line)
        kw = toks[0][0]
        if not header_seen:
            if kw != "cgm" or len(toks) != 1:
                raise ModelError("expected header 'cgm'", lineno, 1)
            header_seen = True
            continue
        if kw == "players":
            if len(toks) != 2 or not toks[1][0].isdigit() or int(toks[1][0]) < 1:
                raise ModelError("expected 'players <n>' with n >= 1", lineno, 1)
            if n_players is not None:
                raise ModelError("players declared twice", lineno, 1)
            n_players = int(toks[1][0])
        elif kw == "actions":
            if len(toks) < 2:
                raise ModelError("expected at least one action", lineno, 1)
            for tok in toks[1:]:
                a = ident(tok, lineno)
                if a in actions:
                    raise ModelError(f"duplicate action {a}", lineno, tok[1])
                actions.append(a)
        elif kw == "state":
            if len(toks) < 2:
                raise ModelError("expected 'state <id> [props ...]'", lineno, 1)
            s = ident(toks[1], lineno)
            if s in labels:
                raise ModelError(f"duplicate state {s}", lineno, toks[1][1])
            props: list[str] = []
            if len(toks) > 2:
                if toks[2][0] != "props":
                    raise ModelError("expected 'props'", lineno, toks[2][1])
                props = [ident(t, lineno) for t in toks[3:]]
                for t in toks[3:]:
                    if t[0].startswith("@"):
                        raise ModelError("propositions starting with '@' are reserved", lineno, t[1])
            states.append(s)
            labels[s] = frozenset(props)
        elif kw == "legal":
            if len(toks) < 4:
                raise ModelError("expected 'legal <state> <player> <action>+'", lineno, 1)
            s = need_state(toks[1], lineno)
            j = need_player(toks[2], lineno)
            if (s, j) in legal:
                raise ModelError(f"legal set for player {j} at {s} given twice", lineno, 1)
            acts = [need_action(t, lineno) for t in toks[3:]]
            if len(set(acts)) != len(acts):
                raise ModelError("duplicate action in legal set", lineno, 1)
            legal[s, j] = tuple(a for a in actions if a in acts)
        elif kw == "trans":
            if n_players is None:
                raise ModelError("players must be declared first", lineno, 1)
            if len(toks) < 5 or toks[2][0] != "(" or toks[-2][0] != ")":
                raise ModelError("expected 'trans <state> (<a1>,...,<an>) <state>'", lineno, 1)
            s = need_state(toks[1], lineno)
            inner = toks[3:-2]
            acts_t = inner[0::2]
            seps = inner[1::2]
            if any(sep[0] != "," for sep in seps) or len(acts_t) != n_players:
                raise ModelError(f"move must list exactly {n_players} actions", lineno, toks[2][1])
            move = []
            for j, tok in enumerate(acts_t, start=1):
                a = need_action(tok, lineno)
                if (s, j) in legal and a not in legal[s, j]:
                    raise ModelError(f"action {a} not legal for player {j} at {s}", lineno, tok[1])
                move.append(a)
            t = need_state(toks[-1], lineno)
            key = (s, tuple(move))
            if key in trans:
                raise ModelError(f"duplicate transition at {s} for ({','.join(move)})", lineno, 1)
            trans[key] = t
        elif kw == "obs":
            if len(toks) < 2:
                raise ModelError("expected 'obs <player> { ... } ...'", lineno, 1)
            j = need_player(toks[1], lineno)
            if j in obs:
                raise ModelError(f"observation partition of player {j} given twice", lineno, 1)
            blocks: list[tuple[str, ...]] = []
            cur = None
            for tok in toks[2:]:
                if tok[0] == "{":
                    if cur is not None:
                        raise ModelError("nested '{'", lineno, tok[1])
                    cur = []
                elif tok[0] == "}":
                    if cur is None:
                        raise ModelError("unmatched '}'", lineno, tok[1])
                    blocks.append(tuple(cur))
                    cur = None
                elif cur is None:
                    raise ModelError(f"unexpected {tok[0]!r} outside braces", lineno, tok[1])
                else:
                    cur.append(need_state(tok, lineno))
            if cur is not None:
                raise ModelError("unterminated '{'", lineno, len(line))
            order = {s: i for i, s in enumerate(states)}
            blocks = [tuple(sorted(b, key=order.__getitem__)) for b in blocks]
            blocks.sort(key=lambda b: order[b[0]] if b else -1)
            obs[j] = tuple(blocks)
        else:
            raise ModelError(f"unknown keyword {kw!r}", lineno, 1)

    if not header_seen:
        raise ModelError("empty model text")
    if n_players is None:
        raise ModelError("missing 'players' line")
    if not states:
        raise ModelError("model declares no states")
    for (s, m) in trans:
        for j, a in enumerate(m, start=1):
            if (s, j) in legal and a not in legal[s, j]:
                raise ModelError(f"action {a} not legal for player {j} at {s}")
    model = GameModel(tuple(states), n_players, tuple(actions), legal, trans, labels, obs)
    if check:
        problems = validate(model)
        if problems:
            raise ModelError(problems[0])
    return model


def serialize_model(model: GameModel) -> str:
    lines = ["cgm", f"players {model.n_players}", "actions " + " ".join(model.actions)]
    for s in model.states:
        props = sorted(model.labels.get(s, ()))
        lines.append(f"state {s}" + (" props " + " ".join(props) if props else ""))
    for s in model.states:
        for j in model.players:
            lines.append(f"legal {s} {j} " + " ".join(model.legal[s, j]))
    for s in model.states:
        for m in model.moves(s):
            lines.append(f"trans {s} ({','.join(m)}) {model.trans[s, m]}")
    for j in sorted(model.obs):
        blocks = " ".join("{ " + " ".join(b) + " }" for b in model.obs[j])
        lines.append(f"obs {j} {blocks}")
    return "\n".join(lines) + "\n"


def build_model(
    states: Iterable[str],
    n_players: int,
    actions: Iterable[str],
    legal: Mapping[tuple[str, int], Iterable[str]],
    trans: Mapping[tuple[str, tuple[str, ...]], str],
    labels: Mapping[str, Iterable[str]] | None = None,
    obs: Mapping[int, Iterable[Iterable[str]]] | None = None,
) -> GameModel:
    """Programmatic constructor normalising orders the same way the parser does."""
    states = tuple(states)
    actions = tuple(actions)
    order = {s: i for i, s in enumerate(states)}
    norm_legal = {
        key: tuple(a for a in actions if a in set(acts)) for key, acts in legal.items()
    }
    labels = labels or {}
    norm_labels = {s: frozenset(labels.get(s, ())) for s in states}
    norm_obs = {}
    for j, blocks in (obs or {}).items():
        bl = [tuple(sorted(b, key=lambda s: order.get(s, len(order)))) for b in blocks]
        bl.sort(key=lambda b: order.get(b[0], len(order)) if b else -1)
        norm_obs[j] = tuple(bl)
    return GameModel(states, n_players, actions, norm_legal, dict(trans), norm_labels, norm_obs)
