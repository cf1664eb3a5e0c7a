"""Backtracking search for a winning bounded-memory coalition profile.

Instead of enumerating complete transducer tables, entries ``(memory, class)``
are chosen only when the product exploration first needs them.  Memory states
are numbered in order of first use, so relabelled copies of a strategy are
never visited twice.  Every complete profile agrees with exactly one explored
partial assignment on its reachable part, so the search is exhaustive.

Objectives are checked incrementally:

* GLOBALLY prunes as soon as an unsafe product state is reached;
* UNTIL stops expanding at goal states and prunes on a state outside the
  maintained set or on a cycle of non-goal states;
* GLOBALLY and UNTIL also prune game states from which no path of the game
  graph satisfies the objective at all;
* NEXT only expands the initial states;
* LTL prunes on a bad prefix (an expanded path that no game continuation
  can extend to a model of the body) and on a counterexample lasso inside
  the expanded part; the full automaton check runs at closure.

The search tree can be cut into an ordered list of subtrees (prefixes of
choice indices); searching them in order reproduces the sequential result,
which is what makes parallel runs deterministic.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .logic import Not, evaluate_propositional
from .model import GameModel
from .product import Arena, ProductSystem
from .strategy import Dfst
from .temporal import Objective, exists_lasso, ltl_to_buchi

log = logging.getLogger(__name__)

__all__ = ["SearchResult", "ProfileSearch", "search_profile"]


@dataclass
class SearchResult:
    profile: Optional[dict[int, Dfst]]
    examined: int = 0
    memory_used: dict[int, int] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.profile is not None


class _Stop(Exception):
    pass


class ProfileSearch:
    def __init__(
        self,
        model: GameModel,
        coalition: Sequence[int],
        k: int,
        starts: Sequence[str],
        objective: Objective,
        labels: Mapping[str, frozenset[str]] | None = None,
    ):
        if k < 1:
            raise ValueError("memory bound must be at least 1")
        self.model = model
        self.members = tuple(sorted(set(coalition)))
        self.k = k
        self.starts = list(dict.fromkeys(starts))
        self.objective = objective
        self.labels = model.labels if labels is None else labels
        self.arena = Arena(model, self.members).moves
        self.cls = [{s: model.class_index(j, s) for s in model.states} for j in self.members]
        self.class_ids = [tuple(c.id for c in model.classes(j)) for j in self.members]
        self.legal = [
            [model.legal[cid, j] for cid in ids] for j, ids in zip(self.members, self.class_ids)
        ]
        lab = {s: self.labels.get(s, frozenset()) for s in model.states}
        kind = objective.kind
        self.kind = kind
        if kind == "NEXT":
            self.goal = {s: evaluate_propositional(objective.goal, lab[s]) for s in model.states}
        elif kind == "GLOBALLY":
            self.safe = {s: evaluate_propositional(objective.safe, lab[s]) for s in model.states}
        elif kind == "UNTIL":
            self.goal = {s: evaluate_propositional(objective.goal, lab[s]) for s in model.states}
            self.keep = {s: evaluate_propositional(objective.maintain, lab[s]) for s in model.states}
        elif kind == "LTL":
            self.buchi = ltl_to_buchi(Not(objective.formula))
        else:
            raise ValueError(f"unknown objective kind {kind}")
        self.hopeless = self._hopeless()
        if kind == "LTL":
            self.pos = ltl_to_buchi(objective.formula)
            self.live = self._live_pairs()
        self.examined = 0

    def _hopeless(self):
        """Game states from which no path at all satisfies a GLOBALLY or UNTIL objective.

        This ignores who controls the moves, so it is sound for every coalition
        and information setting.
        """
        model = self.model
        succ = {s: set(t for ts in self.arena[s].values() for t in ts) for s in model.states}
        if self.kind == "UNTIL":
            ok = {s for s in model.states if self.goal[s]}
            grow = True
            while grow:
                grow = False
                for s in model.states:
                    if s not in ok and self.keep[s] and succ[s] & ok:
                        ok.add(s)
                        grow = True
        elif self.kind == "GLOBALLY":
            ok = {s for s in model.states if self.safe[s]}
            shrink = True
            while shrink:
                shrink = False
                for s in list(ok):
                    if not succ[s] & ok:
                        ok.discard(s)
                        shrink = True
        else:
            return frozenset()
        return frozenset(s for s in model.states if s not in ok)

    def _live_pairs(self):
        """Pairs (game state, state of the automaton for the body) with an accepting continuation.

        A pair is live when some path of the game graph from that state is
        accepted from that automaton state.  Who controls the moves is
        ignored, so this holds for every coalition.
        """
        b = self.pos
        lab = {s: self.labels.get(s, frozenset()) & b.props for s in self.model.states}
        gsucc = {s: set(t for ts in self.arena[s].values() for t in ts) for s in self.model.states}
        edges = {}
        for s in self.model.states:
            for a in range(b.size):
                if b.label[a] == lab[s]:
                    edges[s, a] = [(t, c) for t in gsucc[s] for c in b.succ[a] if b.label[c] == lab[t]]

        def reach(src):
            seen, stack = set(), [src]
            while stack:
                for n in edges[stack.pop()]:
                    if n not in seen:
                        seen.add(n)
                        stack.append(n)
            return seen

        cycling = {n for n in edges if n[1] in b.accepting and n in reach(n)}
        live = set(cycling)
        grow = True
        while grow:
            grow = False
            for n, out in edges.items():
                if n not in live and any(t in live for t in out):
                    live.add(n)
                    grow = True
        return frozenset(live)

    def _bad_prefix(self, succ):
        """An expanded product path after which no continuation can satisfy the body.

        Follows each path with the set of live automaton states that can have
        read it; an empty set means every extension violates the body.
        """
        b = self.pos
        lab = [self.labels.get(s, frozenset()) & b.props for s, _ in self.states]
        stack = []
        for q in dict.fromkeys(self.initial_ids.values()):
            g = self.states[q][0]
            now = frozenset(a for a in b.initial if b.label[a] == lab[q] and (g, a) in self.live)
            if not now:
                return True
            stack.append((q, now))
        seen = set(stack)
        while stack:
            q, now = stack.pop()
            for t in succ[q]:
                g = self.states[t][0]
                nxt = frozenset(c for a in now for c in b.succ[a]
                                if b.label[c] == lab[t] and (g, c) in self.live)
                if not nxt:
                    return True
                if (t, nxt) not in seen:
                    seen.add((t, nxt))
                    stack.append((t, nxt))
        return False

    # -- product bookkeeping ---------------------------------------------------

    def _reset(self):
        n = len(self.members)
        self.tables = [dict() for _ in range(n)]
        self.used = [1] * n
        self.states: list = []
        self.index: dict = {}
        self.succ: list = []
        self.initial_ids = {}
        m0 = (0,) * n
        dead = False
        for s in self.starts:
            q = (s, m0)
            if q not in self.index:
                self.index[q] = len(self.states)
                self.states.append(q)
                if self._bad_state(s):
                    dead = True
            self.initial_ids[s] = self.index[q]
        self.n_initial = len(self.states)
        if self.kind == "LTL" and self._bad_prefix([()] * len(self.states)):
            dead = True
        self.root_dead = dead
        self._last_checked = -1

    def _bad_state(self, s):
        if s in self.hopeless:
            return True
        if self.kind == "GLOBALLY":
            return not self.safe[s]
        if self.kind == "UNTIL":
            return not self.goal[s] and not self.keep[s]
        return False

    def _expands(self, i, s):
        if self.kind == "NEXT":
            return i < self.n_initial
        if self.kind == "UNTIL":
            return not self.goal[s]
        return True

    def _reaches(self, src, dst):
        """Path src ->* dst through expanded non-goal states (UNTIL cycle test)."""
        stack = [src]
        seen = {src}
        while stack:
            v = stack.pop()
            if v == dst:
                return True
            if v >= len(self.succ):
                continue
            for t in self.succ[v]:
                if t not in seen and not self.goal[self.states[t][0]]:
                    seen.add(t)
                    stack.append(t)
        return False

    def _explore(self):
        """Advance the exploration; returns "dead", "closed" or (member, key)."""
        states, index, succ = self.states, self.index, self.succ
        while len(succ) < len(states):
            i = len(succ)
            s, mem = states[i]
            if not self._expands(i, s):
                succ.append(())
                continue
            acts = []
            nmem = []
            for n, tab in enumerate(self.tables):
                key = (mem[n], self.cls[n][s])
                e = tab.get(key)
                if e is None:
                    if self.kind == "LTL" and self._violated_so_far():
                        return "dead"
                    return (n, key)
                acts.append(e[0])
                nmem.append(e[1])
            nmem = tuple(nmem)
            row = []
            dead = False
            for t in self.arena[s][tuple(acts)]:
                q = (t, nmem)
                j = index.get(q)
                if j is None:
                    j = len(states)
                    index[q] = j
                    states.append(q)
                    if self._bad_state(t):
                        dead = True
                elif self.kind == "UNTIL" and not self.goal[t]:
                    if j == i or self._reaches(j, i):
                        dead = True
                if self.kind == "NEXT" and not self.goal[t]:
                    dead = True
                row.append(j)
            succ.append(tuple(row))
            if dead:
                return "dead"
        return "closed"

    def _accepts(self):
        if self.kind != "LTL":
            return True
        ps = ProductSystem(
            tuple(self.states),
            tuple(self.succ),
            tuple(self.labels.get(s, frozenset()) for s, _ in self.states),
            dict(self.initial_ids),
        )
        for q in dict.fromkeys(self.initial_ids.values()):
            if exists_lasso(ps, self.buchi, q) is not None:
                return False
        return True

    def _violated_so_far(self):
        """A counterexample lasso inside the already expanded part of the product.

        Expanded states keep their successors in every completion of the
        current partial assignment, so such a lasso can never go away.
        """
        if len(self.succ) == self._last_checked:
            return False
        self._last_checked = len(self.succ)
        succ = tuple(self.succ) + ((),) * (len(self.states) - len(self.succ))
        if self._bad_prefix(succ):
            return True
        ps = ProductSystem(
            tuple(self.states),
            succ,
            tuple(self.labels.get(s, frozenset()) for s, _ in self.states),
            dict(self.initial_ids),
        )
        return exists_lasso(ps, self.buchi) is not None

    def _checkpoint(self):
        return len(self.states), len(self.succ)

    def _restore(self, cp):
        n_states, n_succ = cp
        for q in self.states[n_states:]:
            del self.index[q]
        del self.states[n_states:]
        del self.succ[n_succ:]
        self._last_checked = -1

    def _choices(self, n, key):
        m, c = key
        top = self.used[n] + 1 if self.used[n] < self.k else self.used[n]
        return [(a, t) for a in self.legal[n][c] for t in range(top)]

    # -- search ------------------------------------------------------------------

    def _rec(self, level, forced, stop_at=None, record=None, path=()):
        res = self._explore()
        if res == "dead" or res == "closed":
            if stop_at is not None:
                record.append(path)
                return None
            self.examined += 1
            return res == "closed" and self._accepts()
        if stop_at is not None and level == stop_at:
            record.append(path)
            return None
        n, key = res
        choices = self._choices(n, key)
        if level < len(forced):
            idxs = [forced[level]]
        else:
            idxs = range(len(choices))
        for ci in idxs:
            a, t = choices[ci]
            cp = self._checkpoint()
            old_used = self.used[n]
            self.tables[n][key] = (a, t)
            if t == self.used[n]:
                self.used[n] += 1
            if self._rec(level + 1, forced, stop_at, record, path + (ci,)):
                return True
            del self.tables[n][key]
            self.used[n] = old_used
            self._restore(cp)
        return None

    def prefixes(self, depth: int) -> list[tuple[int, ...]]:
        """Ordered cut of the search tree at ``depth`` choice levels."""
        self._reset()
        if self.root_dead:
            return [()]
        record: list = []
        self._rec(0, (), stop_at=depth, record=record)
        return record

    def run(self, forced: Sequence[int] = ()) -> SearchResult:
        self._reset()
        self.examined = 0
        if self.root_dead:
            return SearchResult(None, 1)
        if self._rec(0, tuple(forced)):
            return SearchResult(self._witness(), self.examined, dict(zip(self.members, self.used)))
        return SearchResult(None, self.examined)

    def _witness(self) -> dict[int, Dfst]:
        out = {}
        for n, j in enumerate(self.members):
            ids = self.class_ids[n]
            nxt = []
            act = []
            for m in range(self.k):
                row_n, row_a = [], []
                for c in range(len(ids)):
                    e = self.tables[n].get((m, c))
                    if e is None:
                        row_n.append(m)
                        row_a.append(self.legal[n][c][0])
                    else:
                        row_a.append(e[0])
                        row_n.append(e[1])
                nxt.append(tuple(row_n))
                act.append(tuple(row_a))
            out[j] = Dfst(j, ids, tuple(nxt), tuple(act), 0)
        return out


def _run_prefix(args):
    search, prefix = args
    return search.run(prefix)


def search_profile(
    model: GameModel,
    coalition: Sequence[int],
    k: int,
    starts: Sequence[str],
    objective: Objective,
    labels: Mapping[str, frozenset[str]] | None = None,
    jobs: int = 1,
) -> SearchResult:
    """First winning profile in search order, or none.

    With ``jobs > 1`` the tree is cut into ordered subtrees searched by a
    process pool; the returned profile and count equal the sequential run.
    """
    search = ProfileSearch(model, coalition, k, starts, objective, labels)
    if jobs <= 1:
        return search.run()
    depth = 1
    cut = search.prefixes(depth)
    while len(cut) < 4 * jobs and depth < 6:
        depth += 1
        deeper = search.prefixes(depth)
        if len(deeper) == len(cut):
            break
        cut = deeper
    log.debug("searching %d subtrees with %d workers", len(cut), jobs)
    total = 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_prefix, (search, p)) for p in cut]
        for fut in futures:
            res = fut.result()
            total += res.examined
            if res.found:
                for other in futures:
                    other.cancel()
                res.examined = total
                return res
    return SearchResult(None, total)
