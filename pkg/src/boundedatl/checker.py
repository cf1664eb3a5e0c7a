"""Model checking ATL/ATL* under memory-parameterised semantics.

Semantics are indexed by information (complete ``I`` / incomplete ``i``) and
strategy memory: ``r`` (memoryless), ``Fk`` (at most k memory states), ``F``
(any finite memory) and ``R`` (perfect recall).  Nested strategy quantifiers
are handled innermost-first: each quantified subformula is decided at every
state and replaced by a fresh proposition ``@n`` labelling the states where it
holds, until a propositional formula remains.
"""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .logic import (
    Coalition, Const, Formula, Next, Not, Or, Prop, Until, atl_shape, classify, Fragment,
    has_quantifier, is_state_formula, parse_formula, polarity, props_of, strategic_subformulas,
    subformulas, substitute, to_text,
)
from .model import GameModel
from .product import Arena, ProductSystem, build_product
from .search import search_profile
from .strategy import Dfst, format_dfst
from .temporal import exists_lasso, ltl_to_buchi, objective_for

__all__ = [
    "SemanticsSpec", "Verdict", "UnsupportedSemantics", "CheckError",
    "evaluate", "check_quantified", "check_atl_fixpoint_complete",
    "check_finite_memory_deepening", "full_coalition_lasso", "result_record",
    "HOLDS", "FAILS", "UNKNOWN",
]

HOLDS, FAILS, UNKNOWN = "Holds", "Fails", "Unknown"
DEFAULT_CAP = 4
DEFAULT_K_CEILING = 8


class CheckError(ValueError):
    pass


class UnsupportedSemantics(CheckError):
    """The requested semantics has no decision procedure here."""


@dataclass(frozen=True)
class SemanticsSpec:
    memory: str = "r"           # r | Fk | F | R
    k: Optional[int] = None     # required for Fk
    info: str = "auto"          # auto | complete | incomplete
    cap: Optional[int] = None   # deepening bound for F (and R fallback)
    k_ceiling: int = DEFAULT_K_CEILING
    jobs: int = 1

    def __post_init__(self):
        if self.memory not in ("r", "Fk", "F", "R"):
            raise CheckError(f"unknown memory mode {self.memory!r} (use r, Fk, F or R)")
        if self.info not in ("auto", "complete", "incomplete"):
            raise CheckError(f"unknown information mode {self.info!r}")
        if self.memory == "Fk":
            if self.k is None:
                raise CheckError("memory mode Fk needs a bound k")
            if not 1 <= self.k <= self.k_ceiling:
                raise CheckError(f"memory bound k must be in 1..{self.k_ceiling}")
        elif self.k is not None:
            raise CheckError("a memory bound k is only meaningful with Fk")
        if self.cap is not None:
            if self.memory not in ("F", "R"):
                raise CheckError("a deepening cap is only meaningful with F or R")
            if not 1 <= self.cap <= self.k_ceiling:
                raise CheckError(f"deepening cap must be in 1..{self.k_ceiling}")

    def incomplete(self, model: GameModel) -> bool:
        if self.info == "auto":
            return not model.is_complete_information
        return self.info == "incomplete"

    def label(self, model: GameModel) -> str:
        x = "i" if self.incomplete(model) else "I"
        y = {"r": "r", "Fk": f"F{self.k}", "F": "F", "R": "R"}[self.memory]
        return x + y


@dataclass
class Verdict:
    status: str
    state: str
    witness: Optional[dict[int, Dfst]] = None
    memory: Optional[int] = None
    bound: Optional[int] = None
    examined: int = 0

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def __str__(self):
        extra = ""
        if self.status == HOLDS and self.memory is not None:
            extra = f" (memory {self.memory})"
        elif self.status == UNKNOWN and self.bound is not None:
            extra = f" (bound {self.bound} exhausted)"
        return f"{self.state}: {self.status}{extra}"


# -- helpers -------------------------------------------------------------------

def _starts(model, state, coalition, incomplete):
    if not incomplete or not coalition:
        return [state]
    members = set()
    for a in coalition:
        members.update(model.partition(a)[model.class_index(a, state)])
    return [s for s in model.states if s in members]


def _atl_body(body):
    """True for ``X a``, ``G a``, ``(a U b)`` with propositional arguments."""
    shape = atl_shape(body)
    if shape is None:
        return False
    return all(not any(isinstance(h, (Next, Until, Coalition)) for h in subformulas(g))
               for g in shape[1:])


# -- complete-information ATL fixpoint ----------------------------------------------

def _pre(model, arena, target):
    out = set()
    for s in model.states:
        for targets in arena[s].values():
            if all(t in target for t in targets):
                out.add(s)
                break
    return out


def check_atl_fixpoint_complete(model: GameModel, f: Formula | str,
                                labels: Mapping[str, frozenset[str]] | None = None) -> set[str]:
    """States satisfying an ATL formula under complete information.

    Uses the controllable-predecessor operator with least fixpoints for U and
    greatest fixpoints for G; memory plays no role for these objectives.
    """
    if isinstance(f, str):
        f = parse_formula(f)
    if not model.is_complete_information:
        raise CheckError("fixpoint algorithm needs a complete-information model")
    if classify(f) not in (Fragment.PROPOSITIONAL, Fragment.ATL0, Fragment.ATL):
        raise CheckError(f"not an ATL formula: {to_text(f)}")
    labels = model.labels if labels is None else labels
    everything = set(model.states)
    arenas: dict = {}

    def sat(g):
        if isinstance(g, Prop):
            return {s for s in model.states if g.name in labels.get(s, ())}
        if isinstance(g, Const):
            return set(everything) if g.value else set()
        if isinstance(g, Not):
            return everything - sat(g.arg)
        if isinstance(g, Or):
            return sat(g.left) | sat(g.right)
        if isinstance(g, Coalition):
            for j in g.players:
                if j not in model.players:
                    raise CheckError(f"unknown player {j}")
            if g.players not in arenas:
                arenas[g.players] = Arena(model, g.players).moves
            arena = arenas[g.players]
            shape = atl_shape(g.body)
            if shape[0] == "X":
                return _pre(model, arena, sat(shape[1]))
            if shape[0] == "G":
                safe = sat(shape[1])
                z = set(safe)
                while True:
                    nz = safe & _pre(model, arena, z)
                    if nz == z:
                        return z
                    z = nz
            keep, goal = sat(shape[1]), sat(shape[2])
            z = set(goal)
            while True:
                nz = goal | (keep & _pre(model, arena, z))
                if nz == z:
                    return z
                z = nz
        raise CheckError(f"not an ATL formula: {to_text(g)}")

    return sat(f)


# -- full coalition ---------------------------------------------------------------

def full_coalition_lasso(model: GameModel, state: str, body: Formula,
                         labels: Mapping[str, frozenset[str]] | None = None):
    """A path from ``state`` satisfying ``body`` as a lasso of game states, or None."""
    ps = build_product(model, {}, [state], labels)
    lasso = exists_lasso(ps, ltl_to_buchi(body), ps.initial[state])
    if lasso is None:
        return None
    stem = [ps.states[q][0] for q, _ in lasso.stem]
    cycle = [ps.states[q][0] for q, _ in lasso.cycle]
    return stem, cycle


def _lasso_profile(model, stem, cycle):
    """One transducer per player that walks the lasso; memory = position on it."""
    path = stem + cycle
    n = len(path)
    loop_start = len(stem)
    moves = []
    for i, u in enumerate(path):
        v = path[i + 1] if i + 1 < n else path[loop_start]
        moves.append(next(m for m in model.moves(u) if model.trans[u, m] == v))
    profile = {}
    for j in model.players:
        ids = tuple(c.id for c in model.classes(j))
        nxt, out = [], []
        for i in range(n):
            after = i + 1 if i + 1 < n else loop_start
            nxt.append(tuple(after for _ in ids))
            out.append(tuple(
                moves[i][j - 1] if cid == path[i] else model.legal[cid, j][0] for cid in ids
            ))
        profile[j] = Dfst(j, ids, tuple(nxt), tuple(out), 0)
    return profile


# -- quantified subformulas -------------------------------------------------------

SPOILER_BUDGET = 4096


def _spoiled(model, state, coalition, body, labels):
    """Can the other players force ``not body`` from ``state``, reacting to the coalition's move?

    Once a coalition strategy is fixed its action in each round is determined
    by the history, so a counter-strategy may read that action.  Memoryless
    counter-strategies (state, coalition action) -> successor are tried while
    their number stays within ``SPOILER_BUDGET``; past it, only strategies
    reading the current state are searched.  Success means every
    coalition strategy, whatever its memory, has a losing outcome.
    """
    arena = Arena(model, coalition).moves
    seen, stack = {state}, [state]
    while stack:
        for ts in arena[stack.pop()].values():
            for t in ts:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    order = [s for s in model.states if s in seen]
    slots = [(s, acts) for s in order for acts, ts in arena[s].items()]
    count = 1
    for s, acts in slots:
        count *= len(arena[s][acts])
        if count > SPOILER_BUDGET:
            others = tuple(j for j in model.players if j not in coalition)
            res = search_profile(model, others, 1, [state], objective_for(Not(body)), labels, 1)
            return res.found, res.examined
    index = {s: i for i, s in enumerate(order)}
    lab = labels if labels is not None else model.labels
    satisfying = ltl_to_buchi(body)
    tried = 0
    for pick in itertools.product(*(arena[s][acts] for s, acts in slots)):
        tried += 1
        succ = [set() for _ in order]
        for (s, _), t in zip(slots, pick):
            succ[index[s]].add(index[t])
        ps = ProductSystem(
            tuple((s, ()) for s in order),
            tuple(tuple(sorted(x)) for x in succ),
            tuple(frozenset(lab.get(s, ())) for s in order),
            {state: index[state]},
        )
        if exists_lasso(ps, satisfying) is None:
            return True, tried
    return False, tried


def _bounded(model, state, coalition, body, k, incomplete, labels, jobs):
    spent = 0
    if k > 1 and coalition and len(coalition) < model.n_players:
        spoiled, spent = _spoiled(model, state, coalition, body, labels)
        if spoiled:
            return Verdict(FAILS, state, None, None, k, spent)
    starts = _starts(model, state, coalition, incomplete)
    res = search_profile(model, coalition, k, starts, objective_for(body), labels, jobs)
    if res.found:
        return Verdict(HOLDS, state, res.profile, k, k, spent + res.examined)
    return Verdict(FAILS, state, None, None, k, spent + res.examined)


def check_finite_memory_deepening(
    model: GameModel, state: str, coalition: Sequence[int], body: Formula,
    cap: Optional[int], incomplete: bool | None = None,
    labels: Mapping[str, frozenset[str]] | None = None, jobs: int = 1,
) -> Verdict:
    """Try memory bounds 1..cap; Holds at the first success, otherwise Unknown.

    Conclusive shortcuts return Fails: the empty coalition (no choices to
    make), and under complete information ATL bodies (memoryless strategies
    suffice) and the full coalition (a satisfying lasso is a strategy).
    """
    coalition = tuple(sorted(set(coalition)))
    if incomplete is None:
        incomplete = not model.is_complete_information
    if cap is None:
        if incomplete:
            raise UnsupportedSemantics(
                "unsupported semantics iF without a memory cap: finite-memory model checking "
                "under incomplete information is undecidable"
            )
        cap = DEFAULT_CAP
    if cap < 1:
        raise CheckError("deepening cap must be at least 1")
    if not coalition or (not incomplete and _atl_body(body)):
        return _bounded(model, state, coalition, body, 1, incomplete, labels, jobs)
    if not incomplete and coalition == model.players:
        found = full_coalition_lasso(model, state, body, labels)
        if found is None:
            return Verdict(FAILS, state, None, None, None, 1)
        stem, cycle = found
        prof = _lasso_profile(model, stem, cycle)
        return Verdict(HOLDS, state, prof, len(stem) + len(cycle), None, 1)
    examined = 0
    for k in range(1, cap + 1):
        v = _bounded(model, state, coalition, body, k, incomplete, labels, jobs)
        examined += v.examined
        if v.holds:
            v.examined = examined
            return v
    return Verdict(UNKNOWN, state, None, None, cap, examined)


def check_quantified(
    model: GameModel, state: str, coalition: Sequence[int], body: Formula,
    sem: SemanticsSpec, labels: Mapping[str, frozenset[str]] | None = None,
) -> Verdict:
    """Decide ``<<coalition>> body`` at ``state`` for a quantifier-free ``body``."""
    if has_quantifier(body):
        raise CheckError("body of a quantified subformula must be quantifier-free here")
    coalition = tuple(sorted(set(coalition)))
    for j in coalition:
        if j not in model.players:
            raise CheckError(f"unknown player {j}")
    incomplete = sem.incomplete(model)
    if sem.memory in ("r", "Fk"):
        k = 1 if sem.memory == "r" else sem.k
        return _bounded(model, state, coalition, body, k, incomplete, labels, sem.jobs)
    if sem.memory == "F":
        return check_finite_memory_deepening(
            model, state, coalition, body, sem.cap, incomplete, labels, sem.jobs)
    # perfect recall
    if incomplete:
        raise UnsupportedSemantics(
            "unsupported semantics iR: perfect-recall model checking under incomplete "
            "information is undecidable"
        )
    if _atl_body(body):
        sat = check_atl_fixpoint_complete(model, Coalition(coalition, body), labels)
        if state in sat:
            v = _bounded(model, state, coalition, body, 1, False, labels, sem.jobs)
            if not v.holds:
                raise AssertionError("fixpoint and memoryless search disagree")
            return v
        return Verdict(FAILS, state, None, None, None, 1)
    return check_finite_memory_deepening(
        model, state, coalition, body, sem.cap or DEFAULT_CAP, False, labels, sem.jobs)


# -- driver -------------------------------------------------------------------------

def _kleene(f, true_props, unknown_props):
    """Three-valued truth (True/False/None) of a propositional formula."""
    if isinstance(f, Prop):
        if f.name in unknown_props:
            return None
        return f.name in true_props
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        v = _kleene(f.arg, true_props, unknown_props)
        return None if v is None else not v
    if isinstance(f, Or):
        a = _kleene(f.left, true_props, unknown_props)
        b = _kleene(f.right, true_props, unknown_props)
        if a is True or b is True:
            return True
        if a is None or b is None:
            return None
        return False
    raise CheckError(f"not propositional: {to_text(f)}")


def evaluate(
    model: GameModel, f: Formula | str, sem: SemanticsSpec,
    states: Sequence[str] | None = None,
) -> dict[str, Verdict]:
    """Verdict at each state (all states by default) for a state formula."""
    if isinstance(f, str):
        f = parse_formula(f)
    if not is_state_formula(f):
        raise CheckError("top-level formula must be a state formula (wrap path formulas in <<>>)")
    for g in strategic_subformulas(f):
        for j in g.players:
            if j not in model.players:
                raise CheckError(f"unknown player {j}")
    if states is None:
        states = list(model.states)
    for s in states:
        if s not in model.state_index:
            raise CheckError(f"unknown state {s!r}")
    if sem.memory == "R" and sem.incomplete(model) and strategic_subformulas(f):
        raise UnsupportedSemantics(
            "unsupported semantics iR: perfect-recall model checking under incomplete "
            "information is undecidable"
        )
    if sem.memory == "F" and sem.cap is None and sem.incomplete(model) and strategic_subformulas(f):
        raise UnsupportedSemantics(
            "unsupported semantics iF without a memory cap: finite-memory model checking "
            "under incomplete information is undecidable"
        )

    labels = {s: frozenset(model.labels.get(s, ())) for s in model.states}
    unknown: dict[str, set[str]] = {}     # fresh prop -> states with Unknown verdict
    bounds: dict[str, int] = {}
    cur = f
    fresh_n = 0
    while True:
        subs = strategic_subformulas(cur)
        if not subs:
            break
        g = subs[0]
        fresh_n += 1
        name = f"@{fresh_n}"
        needed = states if cur == g else model.states
        verdicts = _decide_everywhere(model, g, sem, labels, unknown, needed)
        for s, v in verdicts.items():
            if v.status == HOLDS:
                labels[s] = labels[s] | {name}
        unk = {s for s, v in verdicts.items() if v.status == UNKNOWN}
        if unk:
            unknown[name] = unk
            bounds[name] = max(v.bound or 0 for v in verdicts.values() if v.status == UNKNOWN)
        if cur == g:
            return {s: verdicts[s] for s in states}
        cur = substitute(cur, g, name)

    out = {}
    for s in states:
        unk_here = {p for p, ss in unknown.items() if s in ss}
        val = _kleene(cur, labels[s], unk_here)
        if val is None:
            b = max((bounds[p] for p in unk_here), default=None)
            out[s] = Verdict(UNKNOWN, s, None, None, b)
        else:
            out[s] = Verdict(HOLDS if val else FAILS, s)
    return out


def _decide_everywhere(model, g, sem, labels, unknown, needed):
    body = g.body
    uncertain = [p for p in props_of(body) if p in unknown]
    cache: dict = {}
    incomplete = sem.incomplete(model)
    out = {}
    for s in needed:
        key = frozenset(_starts(model, s, g.players, incomplete))
        if key in cache:
            v = cache[key]
            out[s] = Verdict(v.status, s, v.witness, v.memory, v.bound, v.examined)
            continue
        if not uncertain:
            v = check_quantified(model, s, g.players, body, sem, labels)
        else:
            v = _decide_uncertain(model, s, g, sem, labels, unknown, uncertain)
        cache[key] = v
        out[s] = v
    return out


def _decide_uncertain(model, s, g, sem, labels, unknown, uncertain):
    """Bracket a verdict whose body mentions propositions with Unknown states.

    For propositions of a single polarity the body is monotone in them, so the
    pessimistic and optimistic labelings bound every possible labeling.
    """
    pol = {p: polarity(g.body, p) for p in uncertain}
    if any(len(v) > 1 for v in pol.values()):
        return Verdict(UNKNOWN, s)

    def labelling(optimistic):
        lab = {}
        for t, ps in labels.items():
            ps = set(ps)
            for p in uncertain:
                if t in unknown[p]:
                    positive = True in pol[p]
                    if positive == optimistic:
                        ps.add(p)
                    else:
                        ps.discard(p)
            lab[t] = frozenset(ps)
        return lab

    lo = check_quantified(model, s, g.players, g.body, sem, labelling(False))
    if lo.status == HOLDS:
        return lo
    hi = check_quantified(model, s, g.players, g.body, sem, labelling(True))
    if hi.status == FAILS:
        return hi
    return Verdict(UNKNOWN, s, None, None, hi.bound or lo.bound)


# -- machine-readable result ------------------------------------------------------

def result_record(model: GameModel, f: Formula, sem: SemanticsSpec, verdict: Verdict,
                  elapsed: float, witness: bool = True) -> dict:
    rec = {
        "state": verdict.state,
        "formula": to_text(f),
        "semantics": sem.label(model),
        "verdict": verdict.status,
        "memory": verdict.memory,
        "bound": verdict.bound,
        "profiles_examined": verdict.examined,
        "wall_time": round(elapsed, 6),
    }
    if witness and verdict.witness is not None:
        rec["witness"] = {str(j): format_dfst(d) for j, d in sorted(verdict.witness.items())}
    return rec


def timed_evaluate(model, f, sem, states=None):
    t0 = time.perf_counter()
    res = evaluate(model, f, sem, states)
    return res, time.perf_counter() - t0


def dumps_records(records) -> str:
    return "\n".join(json.dumps(r, sort_keys=True) for r in records)
