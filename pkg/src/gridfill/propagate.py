"""Sound domain reduction: one-level forward checking and AC-3.

Forward checking is the mechanism the search actually uses; AC-3 is exposed
for generic binary problems and for tests, but deeper propagation is
deliberately never wired into crossword solving.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .model import Bindings, Constraint, HardConstraint, ProblemError, Swcsp

LiveDomains = Mapping[int, tuple[str, ...]]


@dataclass(frozen=True)
class PropagationResult:
    """Reduced live domains plus a failure flag (some live domain emptied)."""

    reduced: dict[int, tuple[str, ...]]
    failed: bool


def initial_live(problem: Swcsp, assignment: Bindings | None = None) -> dict[int, tuple[str, ...]]:
    """Live domains before any propagation: bound variables are singletons."""
    assignment = assignment or {}
    return {
        v: ((assignment[v],) if v in assignment else tuple(problem.domains[v]))
        for v in problem.domains
    }


def _supported(
    c: Constraint, u: int, y: str, live: Mapping[int, tuple[str, ...]]
) -> bool:
    """Does value y for u have support in the other live domains under c?"""
    scope = c.scope
    if len(scope) == 2:
        w = scope[0] if scope[1] == u else scope[1]
        first = scope[0] == u
        for z in live[w]:
            pair = (y, z) if first else (z, y)
            if c.allows(pair):
                return True
        return False
    if isinstance(c, HardConstraint):
        pos = {v: i for i, v in enumerate(scope)}
        others = [v for v in scope if v != u]
        for t in c.allowed:
            if t[pos[u]] != y:
                continue
            if all(t[pos[w]] in live[w] for w in others):
                return True
        return False
    # Intensional constraints of arity >= 3 are not used anywhere; fall back
    # to an exhaustive support scan over the cartesian product.
    others = [v for v in scope if v != u]

    def walk(i: int, partial: dict[int, str]) -> bool:
        if i == len(others):
            return c.allows(tuple(partial[v] for v in scope))
        w = others[i]
        for z in live[w]:
            partial[w] = z
            if walk(i + 1, partial):
                return True
        return False

    return walk(0, {u: y})


def forward_check(
    problem: Swcsp,
    assignment: Bindings,
    v: int,
    live: LiveDomains | None = None,
) -> PropagationResult:
    """One-level lookahead from the binding of v.

    Each variable sharing a hard constraint with v has its live domain
    filtered to the values consistent with v's binding; there is no deeper
    recursion.  When a live domain empties and the problem carries a fallback
    generator, pattern-forced candidates are admitted before declaring
    failure.
    """
    if v not in assignment:
        raise ProblemError(f"variable {v} is not bound")
    reduced = dict(live) if live is not None else initial_live(problem, assignment)
    reduced[v] = (assignment[v],)
    failed = False
    for u in problem.neighbors(v):
        if u in assignment:
            still_ok = all(
                _supported(problem.hard[ci], u, assignment[u], reduced)
                for ci in problem.links(v, u)
            )
            if not still_ok:
                failed = True
            continue
        kept = tuple(
            y
            for y in reduced[u]
            if all(
                _supported(problem.hard[ci], u, y, reduced)
                for ci in problem.links(v, u)
            )
        )
        if not kept and problem.fallback_fills is not None:
            extras = problem.fallback_fills(u, assignment)
            kept = tuple(
                y
                for y in extras
                if all(
                    _supported(problem.hard[ci], u, y, reduced)
                    for ci in problem.links(v, u)
                )
            )
        reduced[u] = kept
        if not kept:
            failed = True
    return PropagationResult(reduced, failed)


def ac3(problem: Swcsp) -> PropagationResult:
    """Arc consistency for binary problems.

    Sound (never discards a solution) and idempotent.  Raises ProblemError on
    constraints of arity three or more.
    """
    for c in problem.hard:
        if len(c.scope) > 2:
            raise ProblemError("ac3 supports only unary and binary constraints")

    domains = {v: list(problem.domains[v]) for v in problem.domains}
    failed = False

    for c in problem.hard:
        if len(c.scope) == 0 and not c.allows(()):
            failed = True
        elif len(c.scope) == 1:
            (v,) = c.scope
            domains[v] = [y for y in domains[v] if c.allows((y,))]
            if not domains[v]:
                failed = True

    arcs = deque()
    links: dict[tuple[int, int], list[Constraint]] = {}
    for c in problem.hard:
        if len(c.scope) != 2:
            continue
        a, b = c.scope
        links.setdefault((a, b), []).append(c)
        links.setdefault((b, a), []).append(c)
    for pair in sorted(links, key=lambda p: (p[0], p[1])):
        arcs.append(pair)

    def revise(u: int, w: int) -> bool:
        removed = False
        kept = []
        view = {u: tuple(domains[u]), w: tuple(domains[w])}
        for y in domains[u]:
            view[u] = (y,)
            if all(_supported(c, u, y, view) for c in links[(u, w)]):
                kept.append(y)
            else:
                removed = True
        domains[u] = kept
        return removed

    while arcs and not failed:
        u, w = arcs.popleft()
        if revise(u, w):
            if not domains[u]:
                failed = True
                break
            # Parallel constraints can share a pair, so every inbound arc is
            # requeued; the usual "skip (w, u)" shortcut is unsound here.
            for (a, b) in sorted(links):
                if b == u:
                    arcs.append((a, b))

    return PropagationResult({v: tuple(d) for v, d in domains.items()}, failed)
