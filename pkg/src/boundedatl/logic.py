"""ATL* formulas: AST, parser, printer and fragment classification.

Derived connectives are removed at parse time so the core is ``p``, ``true``,
``false``, ``!``, ``|``, ``X``, ``U`` and ``<<A>>``:

* ``a & b``  becomes ``!(!a | !b)``
* ``a -> b`` becomes ``!a | b``
* ``F a``    becomes ``(true U a)``
* ``G a``    becomes ``!(true U !a)``

Coalitions are stored as sorted tuples of player indices; ``<<>>`` is the
universal path quantifier.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

__all__ = [
    "Formula", "Prop", "Const", "Not", "Or", "Next", "Until", "Coalition",
    "FormulaSyntaxError", "Fragment", "parse_formula", "to_text", "classify",
    "strategic_subformulas", "substitute", "props_of", "atl_shape",
    "is_state_formula", "has_quantifier", "evaluate_propositional", "size",
    "conj", "globally", "eventually", "TRUE", "FALSE",
]


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Next:
    arg: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Coalition:
    players: tuple[int, ...]
    body: "Formula"


Formula = Union[Prop, Const, Not, Or, Next, Until, Coalition]

TRUE = Const(True)
FALSE = Const(False)


def conj(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def eventually(a: Formula) -> Formula:
    return Until(TRUE, a)


def globally(a: Formula) -> Formula:
    return Not(Until(TRUE, Not(a)))


class FormulaSyntaxError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"column {position + 1}: {message}"
        super().__init__(message)


class Fragment(enum.Enum):
    PROPOSITIONAL = "PROPOSITIONAL"
    LTL = "LTL"
    ATL0 = "ATL0"
    ATL = "ATL"
    ATL0_STAR = "ATL0_STAR"
    ATL_STAR = "ATL_STAR"


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<op><<|>>|<->|->|[!&|(),])|(?P<num>\d+)|(?P<id>@?[A-Za-z_][A-Za-z0-9_]*|@\d+))"
)
_KEYWORDS = {"X", "G", "F", "U", "true", "false"}


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, allow_fresh):
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_fresh = allow_fresh

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise FormulaSyntaxError(f"expected {value!r}, found {what}", tok[2])
        return tok

    def parse(self):
        if self.peek()[0] == "eof":
            raise FormulaSyntaxError("empty formula", 0)
        f = self.implication()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormulaSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def implication(self):
        left = self.disjunction()
        tok = self.peek()
        if tok[1] == "->":
            self.take()
            return Or(Not(left), self.implication())
        if tok[1] == "<->":
            self.take()
            right = self.implication()
            return conj(Or(Not(left), right), Or(Not(right), left))
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek()[1] == "&":
            self.take()
            f = conj(f, self.unary())
        return f

    def unary(self):
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return Not(self.unary())
        if kind == "id" and val in ("X", "G", "F"):
            self.take()
            arg = self.unary()
            return {"X": Next, "G": globally, "F": eventually}[val](arg)
        if val == "<<":
            self.take()
            players = []
            if self.peek()[1] != ">>":
                while True:
                    k, v, p = self.take()
                    if k != "num" or int(v) < 1:
                        raise FormulaSyntaxError("expected a player index", p)
                    players.append(int(v))
                    if self.peek()[1] == ",":
                        self.take()
                        continue
                    break
            self.expect(">>")
            return Coalition(tuple(sorted(set(players))), self.unary())
        return self.atom()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "id":
            if val == "true":
                return TRUE
            if val == "false":
                return FALSE
            if val in _KEYWORDS:
                raise FormulaSyntaxError(f"misplaced operator {val!r}", pos)
            if val.startswith("@") and not self.allow_fresh:
                raise FormulaSyntaxError(f"reserved proposition name {val!r}", pos)
            return Prop(val)
        if val == "(":
            f = self.implication()
            if self.peek()[1] == "U":
                self.take()
                g = self.implication()
                self.expect(")")
                return Until(f, g)
            self.expect(")")
            return f
        what = "end of input" if kind == "eof" else repr(val)
        raise FormulaSyntaxError(f"unexpected {what}", pos)


def parse_formula(text: str, allow_fresh: bool = False) -> Formula:
    """Parse formula text; raises :class:`FormulaSyntaxError`."""
    return _Parser(text, allow_fresh).parse()


def to_text(f: Formula) -> str:
    """Print in core syntax; ``parse_formula(to_text(f)) == f``."""
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return "!" + to_text(f.arg)
    if isinstance(f, Or):
        return f"({to_text(f.left)} | {to_text(f.right)})"
    if isinstance(f, Next):
        return "X " + to_text(f.arg)
    if isinstance(f, Until):
        return f"({to_text(f.left)} U {to_text(f.right)})"
    if isinstance(f, Coalition):
        return "<<" + ",".join(map(str, f.players)) + ">> " + to_text(f.body)
    raise TypeError(f"not a formula: {f!r}")


# -- structure -----------------------------------------------------------------

def _children(f):
    if isinstance(f, (Not, Next)):
        return (f.arg,)
    if isinstance(f, (Or, Until)):
        return (f.left, f.right)
    if isinstance(f, Coalition):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order, left to right."""
    for c in _children(f):
        yield from subformulas(c)
    yield f


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def props_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Prop))


def has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, Coalition) for g in subformulas(f))


def _has_temporal(f):
    return any(isinstance(g, (Next, Until)) for g in subformulas(f))


def is_state_formula(f: Formula) -> bool:
    if isinstance(f, (Prop, Const, Coalition)):
        return True
    if isinstance(f, Not):
        return is_state_formula(f.arg)
    if isinstance(f, Or):
        return is_state_formula(f.left) and is_state_formula(f.right)
    return False


def _is_propositional(f):
    return not has_quantifier(f) and not _has_temporal(f)


def atl_shape(body: Formula) -> Optional[tuple]:
    """Recognise the ATL path shapes ``X a``, ``G a`` and ``(a U b)``.

    Returns ``("X", a)``, ``("G", a)``, ``("U", a, b)`` or None.  The G case
    matches the desugared form ``!(true U !a)``.
    """
    if isinstance(body, Next):
        return ("X", body.arg)
    if (
        isinstance(body, Not)
        and isinstance(body.arg, Until)
        and body.arg.left == TRUE
        and isinstance(body.arg.right, Not)
    ):
        return ("G", body.arg.right.arg)
    if isinstance(body, Until):
        return ("U", body.left, body.right)
    return None


def _is_atl(f):
    if isinstance(f, (Prop, Const)):
        return True
    if isinstance(f, Not):
        return _is_atl(f.arg)
    if isinstance(f, Or):
        return _is_atl(f.left) and _is_atl(f.right)
    if isinstance(f, Coalition):
        shape = atl_shape(f.body)
        return shape is not None and all(_is_atl(g) for g in shape[1:])
    return False


def classify(f: Formula) -> Fragment:
    """Least fragment containing ``f``."""
    if not has_quantifier(f):
        return Fragment.LTL if _has_temporal(f) else Fragment.PROPOSITIONAL
    if isinstance(f, Coalition) and not has_quantifier(f.body):
        shape = atl_shape(f.body)
        if shape is not None and all(_is_propositional(g) for g in shape[1:]):
            return Fragment.ATL0
        return Fragment.ATL0_STAR
    return Fragment.ATL if _is_atl(f) else Fragment.ATL_STAR


def strategic_subformulas(f: Formula) -> list[Coalition]:
    """Quantified subformulas, innermost first, without repeats."""
    out = []
    seen = set()
    for g in subformulas(f):
        if isinstance(g, Coalition) and g not in seen:
            seen.add(g)
            out.append(g)
    return out


def _replace(f, target, repl):
    if f == target:
        return repl
    if isinstance(f, Not):
        return Not(_replace(f.arg, target, repl))
    if isinstance(f, Next):
        return Next(_replace(f.arg, target, repl))
    if isinstance(f, Or):
        return Or(_replace(f.left, target, repl), _replace(f.right, target, repl))
    if isinstance(f, Until):
        return Until(_replace(f.left, target, repl), _replace(f.right, target, repl))
    if isinstance(f, Coalition):
        return Coalition(f.players, _replace(f.body, target, repl))
    return f


def substitute(f: Formula, target: Formula, prop: str) -> Formula:
    """Replace every occurrence of ``target`` by the fresh proposition ``prop``."""
    if prop in props_of(f):
        raise ValueError(f"proposition {prop} already occurs in the formula")
    if not any(g == target for g in subformulas(f)):
        raise ValueError("target does not occur in the formula")
    return _replace(f, target, Prop(prop))


def polarity(f: Formula, name: str) -> set[bool]:
    """Polarities (True = positive) under which proposition ``name`` occurs."""
    out: set[bool] = set()

    def walk(g, pos):
        if isinstance(g, Prop):
            if g.name == name:
                out.add(pos)
        elif isinstance(g, Not):
            walk(g.arg, not pos)
        else:
            for c in _children(g):
                walk(c, pos)

    walk(f, True)
    return out


def evaluate_propositional(f: Formula, labels: Mapping[str, object] | frozenset[str]) -> bool:
    """Truth of a propositional formula under a set of true propositions."""
    if isinstance(f, Prop):
        return f.name in labels
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate_propositional(f.arg, labels)
    if isinstance(f, Or):
        return evaluate_propositional(f.left, labels) or evaluate_propositional(f.right, labels)
    raise ValueError(f"not propositional: {to_text(f)}")
