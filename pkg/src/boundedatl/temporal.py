"""Universal path properties on product systems.

The one-step, safety and reachability shapes are decided by fixpoint labeling.
General LTL bodies go through a tableau Büchi automaton for the negated
formula and a nested depth-first search for an accepting lasso.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .logic import (
    Const, Coalition, Formula, Next, Not, Or, Prop, Until, atl_shape, evaluate_propositional,
    has_quantifier, props_of, subformulas, to_text,
)
from .product import ProductSystem

__all__ = [
    "Objective", "BuchiAutomaton", "Lasso", "objective_for", "check_universal_objective",
    "ltl_to_buchi", "exists_lasso", "check_universal_ltl", "format_lasso",
]


@dataclass(frozen=True)
class Objective:
    """``kind`` is NEXT, GLOBALLY, UNTIL or LTL.

    NEXT uses ``goal``; GLOBALLY uses ``safe``; UNTIL uses ``maintain`` and
    ``goal``; LTL uses ``formula``.  The set arguments are propositional
    formulas evaluated on state labels.
    """
    kind: str
    goal: Optional[Formula] = None
    safe: Optional[Formula] = None
    maintain: Optional[Formula] = None
    formula: Optional[Formula] = None

    def props(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for f in (self.goal, self.safe, self.maintain, self.formula):
            if f is not None:
                out |= props_of(f)
        return out


def _propositional(f):
    return not any(isinstance(g, (Next, Until, Coalition)) for g in subformulas(f))


def objective_for(body: Formula) -> Objective:
    """Pick the cheapest objective representation for a quantifier-free path formula."""
    if has_quantifier(body):
        raise ValueError("objective bodies must be free of strategy quantifiers")
    shape = atl_shape(body)
    if shape is not None and all(_propositional(g) for g in shape[1:]):
        if shape[0] == "X":
            return Objective("NEXT", goal=shape[1])
        if shape[0] == "G":
            return Objective("GLOBALLY", safe=shape[1])
        return Objective("UNTIL", maintain=shape[1], goal=shape[2])
    return Objective("LTL", formula=body)


def check_universal_objective(ps: ProductSystem, obj: Objective) -> set[int]:
    """Product states from which every path satisfies a NEXT/GLOBALLY/UNTIL objective."""
    n = len(ps.states)

    def holds(f):
        return [evaluate_propositional(f, ps.labels[q]) for q in range(n)]

    if obj.kind == "NEXT":
        goal = holds(obj.goal)
        return {q for q in range(n) if all(goal[t] for t in ps.succ[q])}
    if obj.kind == "GLOBALLY":
        z = set(q for q, ok in enumerate(holds(obj.safe)) if ok)
        changed = True
        while changed:
            changed = False
            for q in list(z):
                if any(t not in z for t in ps.succ[q]):
                    z.discard(q)
                    changed = True
        return z
    if obj.kind == "UNTIL":
        goal = holds(obj.goal)
        keep = holds(obj.maintain)
        z = {q for q in range(n) if goal[q]}
        changed = True
        while changed:
            changed = False
            for q in range(n):
                if q not in z and keep[q] and ps.succ[q] and all(t in z for t in ps.succ[q]):
                    z.add(q)
                    changed = True
        return z
    raise ValueError(f"objective kind {obj.kind} needs the automaton route")


# -- Büchi automata -----------------------------------------------------------

@dataclass(frozen=True)
class BuchiAutomaton:
    """State-labelled Büchi automaton.

    A run ``b0 b1 ...`` reads the word ``w0 w1 ...`` when each ``label[b_i]``
    equals the set of true propositions of ``w_i`` restricted to ``props``.
    """
    props: frozenset[str]
    label: tuple[frozenset[str], ...]
    succ: tuple[tuple[int, ...], ...]
    initial: tuple[int, ...]
    accepting: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.label)

    def accepts_lasso(self, stem: Sequence[frozenset[str]], cycle: Sequence[frozenset[str]]) -> bool:
        """Acceptance of the ultimately periodic word ``stem cycle^omega``."""
        word = [frozenset(w) & self.props for w in stem]
        loop = [frozenset(w) & self.props for w in cycle]
        n_stem, n_loop = len(word), len(loop)
        # nodes: (automaton state, position) with position < n_stem + n_loop
        def letter(i):
            return word[i] if i < n_stem else loop[i - n_stem]

        def nxt(i):
            return i + 1 if i + 1 < n_stem + n_loop else n_stem

        graph = {}
        start = [(b, 0) for b in self.initial if self.label[b] == letter(0)]
        stack = list(start)
        seen = set(start)
        while stack:
            b, i = stack.pop()
            j = nxt(i)
            outs = [(c, j) for c in self.succ[b] if self.label[c] == letter(j)]
            graph[b, i] = outs
            for o in outs:
                if o not in seen:
                    seen.add(o)
                    stack.append(o)
        return _has_accepting_cycle(graph, {v for v in seen if v[0] in self.accepting})


def _has_accepting_cycle(graph, accepting):
    for a in accepting:
        stack = list(graph.get(a, ()))
        seen = set()
        while stack:
            v = stack.pop()
            if v == a:
                return True
            if v in seen:
                continue
            seen.add(v)
            stack.extend(graph.get(v, ()))
    return False


def ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    """Tableau construction over elementary sets of subformulas, degeneralised."""
    if has_quantifier(f):
        raise ValueError(f"strategy quantifier in LTL formula {to_text(f)}")
    cl = list(dict.fromkeys(subformulas(f)))
    ap = props_of(f)
    untils = [g for g in cl if isinstance(g, Until)]

    # elementary sets, built along post-order so children are decided first
    sets: list[frozenset] = []

    def rec(i, chosen):
        if i == len(cl):
            sets.append(frozenset(chosen))
            return
        g = cl[i]
        if isinstance(g, Const):
            options = [g.value]
        elif isinstance(g, Not):
            options = [g.arg not in chosen]
        elif isinstance(g, Or):
            options = [g.left in chosen or g.right in chosen]
        elif isinstance(g, Until):
            if g.right in chosen:
                options = [True]
            elif g.left in chosen:
                options = [False, True]
            else:
                options = [False]
        else:  # Prop, Next
            options = [False, True]
        for v in options:
            if v:
                chosen.add(g)
            rec(i + 1, chosen)
            if v:
                chosen.discard(g)

    rec(0, set())

    def step_ok(b, c):
        for g in cl:
            if isinstance(g, Next) and ((g in b) != (g.arg in c)):
                return False
            if isinstance(g, Until):
                want = g.right in b or (g.left in b and g in c)
                if (g in b) != want:
                    return False
        return True

    n_acc = max(1, len(untils))

    def in_f(b, i):
        if not untils:
            return True
        u = untils[i]
        return u not in b or u.right in b

    index: dict = {}
    label: list = []
    succ: list = []
    accepting = set()
    todo = []

    def node(b_idx, i):
        key = (b_idx, i)
        if key not in index:
            index[key] = len(label)
            label.append(frozenset(g.name for g in sets[b_idx] if isinstance(g, Prop)))
            succ.append(None)
            if i == 0 and in_f(sets[b_idx], 0):
                accepting.add(index[key])
            todo.append(key)
        return index[key]

    initial = tuple(node(bi, 0) for bi, b in enumerate(sets) if f in b)
    while todo:
        bi, i = todo.pop()
        b = sets[bi]
        j = (i + 1) % n_acc if in_f(b, i) else i
        me = index[bi, i]
        succ[me] = tuple(node(ci, j) for ci, c in enumerate(sets) if step_ok(b, c))
    return BuchiAutomaton(ap, tuple(label), tuple(succ), initial, frozenset(accepting))


# -- emptiness ----------------------------------------------------------------

@dataclass(frozen=True)
class Lasso:
    stem: tuple[tuple[int, int], ...]   # (product state, automaton state)
    cycle: tuple[tuple[int, int], ...]  # cycle[0] follows the stem; cycle returns to cycle[0]


def _product_succ(ps, b):
    def succ(node):
        q, a = node
        out = []
        for t in ps.succ[q]:
            lt = ps.labels[t] & b.props
            for c in b.succ[a]:
                if b.label[c] == lt:
                    out.append((t, c))
        return out
    return succ


def exists_lasso(ps: ProductSystem, b: BuchiAutomaton, start: Optional[int] = None) -> Optional[Lasso]:
    """Nested depth-first search for an accepting lasso from the initial product states.

    ``start`` restricts the search to one product state as the origin.
    """
    origins = [start] if start is not None else list(dict.fromkeys(ps.initial.values()))
    succ = _product_succ(ps, b)
    roots = []
    for q in origins:
        lq = ps.labels[q] & b.props
        roots.extend((q, a) for a in b.initial if b.label[a] == lq)

    outer_seen = set()
    inner_seen = set()
    for root in roots:
        if root in outer_seen:
            continue
        outer_seen.add(root)
        stack = [(root, iter(succ(root)))]
        while stack:
            node, it = stack[-1]
            advanced = False
            for t in it:
                if t not in outer_seen:
                    outer_seen.add(t)
                    stack.append((t, iter(succ(t))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if node[1] in b.accepting:
                cyc = _inner(node, succ, inner_seen)
                if cyc is not None:
                    stem = tuple(n for n, _ in stack)
                    return Lasso(stem, cyc)
    return None


def _inner(seed, succ, seen):
    stack = [(seed, iter(succ(seed)))]
    while stack:
        node, it = stack[-1]
        advanced = False
        for t in it:
            if t == seed:
                return tuple(n for n, _ in stack)
            if t not in seen:
                seen.add(t)
                stack.append((t, iter(succ(t))))
                advanced = True
                break
        if not advanced:
            stack.pop()
    return None


def check_universal_ltl(ps: ProductSystem, f: Formula) -> dict[str, bool]:
    """For each start state: do all paths of the product satisfy ``f``?"""
    b = ltl_to_buchi(Not(f))
    return {s: exists_lasso(ps, b, q) is None for s, q in ps.initial.items()}


def format_lasso(ps: ProductSystem, lasso: Lasso) -> str:
    stem = " ".join(ps.states[q][0] for q, _ in lasso.stem)
    cyc = " ".join(ps.states[q][0] for q, _ in lasso.cycle)
    return f"lasso: {stem} [ {cyc} ]".replace("  ", " ")
