"""Damage-based value ordering and min2-gap variable selection.

The damage of binding v = f is the increase in the global cost lower bound
caused by the commitment after one level of lookahead.  Terms for variables
not adjacent to v cancel in the difference, so only v and its constraint
neighbors are evaluated.  Pitched (variable, value) pairs are ignored by the
heuristics except when they are a variable's only remaining live value, in
which case the variable counts as forced.
"""

from __future__ import annotations

import math
from collections import ChainMap
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import Bindings, Constraint, HardConstraint, INFINITY, ProblemError, Swcsp

PitchedPairs = frozenset  # of (variable id, token)

NO_PITCHES: PitchedPairs = frozenset()


class FailedState(Exception):
    """The current search state admits no extension (dead end)."""


@dataclass(frozen=True)
class ValueScore:
    value: str
    damage: float


@dataclass(frozen=True)
class VariableGap:
    var: int
    gap: float


def min2(xs: Iterable[float]) -> float:
    """Second-smallest element counting multiplicity; needs two elements."""
    pair = sorted(xs)[:2]
    if len(pair) < 2:
        raise ValueError("min2 needs at least two elements")
    return pair[1]


def considered_values(
    live: Sequence[str], var: int, pitched: PitchedPairs
) -> list[str]:
    """Live values the heuristics may look at: unpitched, or a forced singleton."""
    unpitched = [y for y in live if (var, y) not in pitched]
    if unpitched:
        return unpitched
    if len(live) == 1:
        return list(live)
    return []


def state_bound(
    problem: Swcsp,
    assignment: Bindings,
    live: Mapping[int, tuple[str, ...]],
    pitched: PitchedPairs = NO_PITCHES,
) -> float:
    """Lower bound on the cost of any completion of the current state.

    Bound variables contribute exact table costs; unbound ones contribute the
    cheapest cost over their live (unpitched) values.
    """
    total = 0.0
    for v in problem.domains:
        if v in assignment:
            total += problem.unary_cost(v, assignment[v])
            continue
        if not live[v]:
            raise FailedState(f"empty live domain for variable {v}")
        total += problem.min_unary_cost(v, considered_values(live[v], v, pitched))
    return total


class _Ranker:
    """Per-node damage evaluator with shared support-minimum memoization.

    Filtering a neighbor's live set by a candidate binding is the hot path;
    results are keyed by the constraint's support key (for crossing-letter
    constraints, the forced letter) so candidates that pin the same letters
    share work.
    """

    def __init__(
        self,
        problem: Swcsp,
        assignment: Bindings,
        live: Mapping[int, tuple[str, ...]],
        pitched: PitchedPairs,
    ) -> None:
        self.problem = problem
        self.assignment = assignment
        self.live = live
        self.pitched = pitched
        self._considered: dict[int, list[str]] = {}
        self._pre_min: dict[int, float] = {}
        self._post_memo: dict = {}

    def considered(self, v: int) -> list[str]:
        got = self._considered.get(v)
        if got is None:
            got = considered_values(self.live[v], v, self.pitched)
            self._considered[v] = got
        return got

    def pre_min(self, v: int) -> float:
        got = self._pre_min.get(v)
        if got is None:
            got = self.problem.min_unary_cost(v, self.considered(v))
            self._pre_min[v] = got
        return got

    def _support_view(self, v: int, f: str):
        return ChainMap({v: (f,)}, self.live)

    def _post_min(self, u: int, v: int, f: str) -> float:
        problem = self.problem
        links = problem.links(v, u)
        key_parts = []
        for ci in links:
            c = problem.hard[ci]
            keyfn = getattr(c, "support_key", None)
            key_parts.append((ci, keyfn(v, f) if keyfn else f))
        key = (u, tuple(key_parts))
        got = self._post_memo.get(key)
        if got is not None:
            return got
        view = self._support_view(v, f)
        kept = [
            y
            for y in self.considered(u)
            if all(_supports(problem.hard[ci], u, y, view) for ci in links)
        ]
        if not kept and problem.fallback_fills is None:
            got = INFINITY  # the binding would empty u's live domain
        else:
            got = problem.min_unary_cost(u, kept)
        self._post_memo[key] = got
        return got

    def damage(self, v: int, f: str) -> float:
        problem = self.problem
        total = problem.unary_cost(v, f) - self.pre_min(v)
        view = None
        for u in problem.neighbors(v):
            if u in self.assignment:
                if view is None:
                    view = self._support_view(v, f)
                ok = all(
                    _supports(problem.hard[ci], u, self.assignment[u], view)
                    for ci in problem.links(v, u)
                )
                if not ok:
                    return INFINITY
                continue
            after = self._post_min(u, v, f)
            if math.isinf(after):
                return INFINITY
            total += after - self.pre_min(u)
        return total

    def gap(self, v: int) -> float:
        cons = self.considered(v)
        if not cons:
            raise FailedState(f"no branchable value for variable {v}")
        if len(cons) == 1:
            return INFINITY
        damages = [self.damage(v, f) for f in cons]
        best = min(damages)
        if math.isinf(best):
            return INFINITY
        return min2(damages) - best


def _supports(c: Constraint, u: int, y: str, live) -> bool:
    scope = c.scope
    if len(scope) == 2:
        w = scope[0] if scope[1] == u else scope[1]
        first = scope[0] == u
        for z in live[w]:
            if c.allows((y, z) if first else (z, y)):
                return True
        return False
    if isinstance(c, HardConstraint):
        pos = {v: i for i, v in enumerate(scope)}
        others = [v for v in scope if v != u]
        for t in c.allowed:
            if t[pos[u]] == y and all(t[pos[w]] in live[w] for w in others):
                return True
        return False
    raise ProblemError("unsupported constraint arity for damage evaluation")


def damage(
    problem: Swcsp,
    assignment: Bindings,
    live: Mapping[int, tuple[str, ...]],
    v: int,
    f: str,
    pitched: PitchedPairs = NO_PITCHES,
) -> float:
    """Cost-bound increase caused by binding v = f and forward checking.

    +inf when the binding would empty a neighbor's live domain (and no
    fallback fill rescues it).
    """
    if f not in live[v]:
        raise ProblemError(f"value {f!r} not live for variable {v}")
    return _Ranker(problem, assignment, live, pitched).damage(v, f)


def order_values(
    problem: Swcsp,
    assignment: Bindings,
    live: Mapping[int, tuple[str, ...]],
    v: int,
    pitched: PitchedPairs = NO_PITCHES,
) -> list[ValueScore]:
    """Branchable values of v, ascending by damage; ties break on the token."""
    ranker = _Ranker(problem, assignment, live, pitched)
    scores = [ValueScore(f, ranker.damage(v, f)) for f in ranker.considered(v)]
    scores.sort(key=lambda s: (s.damage, s.value))
    return scores


def select_variable(
    problem: Swcsp,
    assignment: Bindings,
    live: Mapping[int, tuple[str, ...]],
    pitched: PitchedPairs = NO_PITCHES,
    among: Iterable[int] | None = None,
) -> int:
    """Unbound variable with the largest min2 gap.

    Forced variables (one branchable value) have gap +inf and win; ties break
    toward the lowest variable id.  Raises FailedState when some unbound
    variable has no branchable value at all.
    """
    ranker = _Ranker(problem, assignment, live, pitched)
    pool = sorted(among) if among is not None else sorted(problem.domains)
    best_var, best_gap = None, -INFINITY
    for v in pool:
        if v in assignment:
            continue
        gap = ranker.gap(v)
        if best_var is None or gap > best_gap:
            best_var, best_gap = v, gap
    if best_var is None:
        raise ProblemError("no unbound variable to select")
    return best_var


def choose_branch(
    problem: Swcsp,
    assignment: Bindings,
    live: Mapping[int, tuple[str, ...]],
    pitched: PitchedPairs = NO_PITCHES,
    among: Iterable[int] | None = None,
) -> tuple[int, list[ValueScore]]:
    """Select the branching variable and its damage-ordered values in one pass."""
    ranker = _Ranker(problem, assignment, live, pitched)
    pool = sorted(among) if among is not None else sorted(problem.domains)
    best_var, best_gap = None, -INFINITY
    for v in pool:
        if v in assignment:
            continue
        gap = ranker.gap(v)
        if best_var is None or gap > best_gap:
            best_var, best_gap = v, gap
    if best_var is None:
        raise ProblemError("no unbound variable to select")
    scores = [ValueScore(f, ranker.damage(best_var, f)) for f in ranker.considered(best_var)]
    scores.sort(key=lambda s: (s.damage, s.value))
    return best_var, scores
