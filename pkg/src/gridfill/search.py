"""Solving procedures for singly weighted CSPs.

Five algorithms share one engine:

* ``backtrack`` — plain chronological backtracking, first solution wins.
* ``bnb`` — branch and bound; prunes states whose bound reaches the incumbent.
* ``lds`` — pitch-based limited discrepancy search with bound pruning.
* ``lds_post`` — the same pitch tree with no pruning anywhere and every
  completed leaf improved by postprocessing.  Bound pruning and
  postprocessing are fundamentally at odds: a leaf that prunes badly may
  postprocess brilliantly, so the two are never combined in a supported
  algorithm.
* ``andor`` — ``lds_post`` plus problem splitting: when the residual
  constraint graph disconnects, each component is solved independently with
  the full discrepancy limit and the solutions are unioned.

A discrepancy pitches the heuristic's chosen (variable, value) pair: the pair
is excluded from branching while remaining live, and both the variable and
the value are recomputed from scratch afterwards.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from . import heuristics
from .model import Bindings, INFINITY, ProblemError, Swcsp, cost as full_cost
from .propagate import forward_check

ALGORITHMS = ("backtrack", "bnb", "lds", "lds_post", "andor")

PitchSet = frozenset  # of (variable id, token) pairs

_EMPTY_PITCHES: PitchSet = frozenset()


class ConfigError(ValueError):
    """Invalid search configuration."""


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str = "lds_post"
    max_discrepancies: int = 0
    iterative: bool = False
    budget_seconds: float | None = None
    stall_seconds: float | None = None
    stop_on_no_improvement: bool = False
    seed: int = 0

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.max_discrepancies < 0:
            raise ConfigError("max_discrepancies must be >= 0")
        if self.budget_seconds is not None and not self.budget_seconds > 0:
            raise ConfigError("budget must be positive")
        if self.stall_seconds is not None and not self.stall_seconds > 0:
            raise ConfigError("stall window must be positive")


@dataclass
class SearchStats:
    algorithm: str = ""
    n: int = 0
    nodes_expanded: int = 0
    discrepancies_used: int = 0
    best_cost: float = INFINITY
    trace: list[tuple[int, float]] = field(default_factory=list)
    iterations: int = 0
    wall_ms: float = 0.0
    stopped_by: str = ""

    def to_json(self) -> dict:
        """Stats in the stable wire schema."""
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "nodes_expanded": self.nodes_expanded,
            "discrepancies_used": self.discrepancies_used,
            "cost": None if self.best_cost == INFINITY else self.best_cost,
            "trace": [[n, c] for n, c in self.trace],
            "wall_ms": self.wall_ms,
        }


@dataclass(frozen=True)
class SearchResult:
    assignment: dict[int, str] | None
    cost: float
    stats: SearchStats


class _Stopped(Exception):
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


class _Controller:
    """Wall-clock budget and stall tracking, consulted between expansions."""

    def __init__(self, budget_seconds: float | None, stall_seconds: float | None) -> None:
        now = time.monotonic()
        self.deadline = now + budget_seconds if budget_seconds is not None else None
        self.stall = stall_seconds
        self.last_improvement = now

    def improved(self) -> None:
        self.last_improvement = time.monotonic()

    def check(self) -> None:
        now = time.monotonic()
        if self.deadline is not None and now >= self.deadline:
            raise _Stopped("budget")
        if self.stall is not None and now - self.last_improvement >= self.stall:
            raise _Stopped("stall")


class _Search:
    def __init__(
        self,
        problem: Swcsp,
        stats: SearchStats,
        controller: _Controller | None = None,
        on_leaf: Callable[[dict[int, str]], None] | None = None,
    ) -> None:
        self.problem = problem
        self.stats = stats
        self.controller = controller
        self.on_leaf = on_leaf
        self.top = frozenset(problem.domains)
        self.best: dict[int, str] | None = None  # last global incumbent

    # -- plumbing ----------------------------------------------------------

    def _tick(self) -> None:
        self.stats.nodes_expanded += 1
        if self.controller is not None:
            self.controller.check()

    def _root_live(self) -> dict[int, tuple[str, ...]] | None:
        """Initial live domains, or None when trivially unsatisfiable."""
        problem = self.problem
        live: dict[int, tuple[str, ...]] = {}
        for c in problem.hard:
            if not c.scope and not c.allows(()):
                return None
        for v in problem.domains:
            dom = problem.domains[v]
            unary = [problem.hard[ci] for ci in problem.constraints_of(v)
                     if problem.hard[ci].scope == (v,)]
            kept = tuple(y for y in dom if all(c.allows((y,)) for c in unary))
            if not kept:
                return None
            live[v] = kept
        return live

    def _scope_cost(self, assignment: Mapping[int, str] | None, scope: frozenset) -> float:
        if assignment is None:
            return INFINITY
        return sum(self.problem.unary_cost(v, assignment[v]) for v in scope)

    def _bound(
        self,
        assignment: Bindings,
        live: Mapping[int, tuple[str, ...]],
        scope: frozenset,
        pitched: PitchSet,
    ) -> float:
        total = 0.0
        problem = self.problem
        for v in scope:
            if v in assignment:
                total += problem.unary_cost(v, assignment[v])
            else:
                vals = heuristics.considered_values(live[v], v, pitched)
                total += problem.min_unary_cost(v, vals)
        return total

    def _better(
        self,
        cand: dict[int, str] | None,
        incumbent: dict[int, str] | None,
        scope: frozenset,
    ) -> dict[int, str] | None:
        """Keep whichever of cand and incumbent is strictly cheaper."""
        if cand is None:
            return incumbent
        if self._scope_cost(cand, scope) < self._scope_cost(incumbent, scope):
            if scope == self.top:
                self.best = cand
                self.stats.best_cost = self._scope_cost(cand, scope)
                self.stats.trace.append((self.stats.nodes_expanded, self.stats.best_cost))
                if self.controller is not None:
                    self.controller.improved()
            return cand
        return incumbent

    # -- postprocessing ----------------------------------------------------

    def _postprocess(self, assignment: Mapping[int, str], scope: Iterable[int]) -> dict[int, str]:
        """Hill climb: re-optimize one variable at a time until a full pass
        makes no change.  Cost never increases."""
        problem = self.problem
        out = dict(assignment)
        order = sorted(scope)
        changed = True
        while changed:
            changed = False
            for v in order:
                current = out[v]
                best_tok = current
                best_cost = problem.unary_cost(v, current)
                candidates = list(problem.domains[v])
                if problem.fallback_fills is not None:
                    others = {u: t for u, t in out.items() if u != v}
                    for extra in problem.fallback_fills(v, others):
                        if extra not in candidates:
                            candidates.append(extra)
                for y in candidates:
                    if y == best_tok:
                        continue
                    c = problem.unary_cost(v, y)
                    if c >= best_cost:
                        continue
                    if self._move_consistent(out, v, y):
                        best_tok, best_cost = y, c
                if best_tok != current:
                    out[v] = best_tok
                    changed = True
        return out

    def _move_consistent(self, assignment: Mapping[int, str], v: int, y: str) -> bool:
        problem = self.problem
        for ci in problem.constraints_of(v):
            c = problem.hard[ci]
            values = []
            evaluable = True
            for w in c.scope:
                if w == v:
                    values.append(y)
                elif w in assignment:
                    values.append(assignment[w])
                else:
                    evaluable = False  # variable of another split component
                    break
            if evaluable and not c.allows(tuple(values)):
                return False
        return True

    # -- chronological backtracking (first solution) ------------------------

    def backtrack(self) -> dict[int, str] | None:
        live = self._root_live()
        if live is None:
            return None
        return self._backtrack({}, live)

    def _backtrack(self, assignment, live):
        self._tick()
        if len(assignment) == len(self.problem.domains):
            return dict(assignment)
        try:
            v, scores = heuristics.choose_branch(self.problem, assignment, live)
        except heuristics.FailedState:
            return None
        for vs in scores:
            nxt = dict(assignment)
            nxt[v] = vs.value
            res = forward_check(self.problem, nxt, v, live)
            if res.failed:
                continue
            found = self._backtrack(nxt, res.reduced)
            if found is not None:
                return found
        return None

    # -- branch and bound ----------------------------------------------------

    def bnb(self) -> dict[int, str] | None:
        live = self._root_live()
        if live is None:
            return None
        return self._bnb({}, live, None)

    def _bnb(self, assignment, live, incumbent):
        self._tick()
        if incumbent is not None:
            bound = self._bound(assignment, live, self.top, _EMPTY_PITCHES)
            if bound >= self._scope_cost(incumbent, self.top):
                return incumbent
        if len(assignment) == len(self.problem.domains):
            return self._better(dict(assignment), incumbent, self.top)
        try:
            v, scores = heuristics.choose_branch(self.problem, assignment, live)
        except heuristics.FailedState:
            return incumbent
        for vs in scores:
            nxt = dict(assignment)
            nxt[v] = vs.value
            res = forward_check(self.problem, nxt, v, live)
            if res.failed:
                continue
            incumbent = self._bnb(nxt, res.reduced, incumbent)
        return incumbent

    # -- the LDS family ------------------------------------------------------

    def lds(
        self,
        n: int,
        incumbent: dict[int, str] | None = None,
        *,
        prune: bool,
        post: bool,
        andor: bool,
    ) -> dict[int, str] | None:
        live = self._root_live()
        if live is None:
            return incumbent
        if incumbent is not None and self.best is None:
            self.best = incumbent
            self.stats.best_cost = self._scope_cost(incumbent, self.top)
        return self._lds(
            {}, live, _EMPTY_PITCHES, incumbent, self.top, n,
            prune=prune, post=post, andor=andor,
        )

    def _components(self, unbound: list[int]) -> list[list[int]]:
        pool = set(unbound)
        seen: set[int] = set()
        comps = []
        for start in sorted(pool):
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            stack = [start]
            while stack:
                v = stack.pop()
                for u in self.problem.neighbors(v):
                    if u in pool and u not in seen:
                        seen.add(u)
                        comp.append(u)
                        stack.append(u)
            comps.append(sorted(comp))
        return comps

    def _lds(self, assignment, live, pitched, incumbent, scope, n, *, prune, post, andor):
        if self.controller is not None:
            self.controller.check()
        unbound = [v for v in scope if v not in assignment]
        if andor and len(unbound) > 1:
            comps = self._components(unbound)
            if len(comps) > 1:
                # Split dispatch: solve the first component against the rest,
                # each with the full remaining limit; no node is charged.
                first = frozenset(comps[0])
                rest = frozenset(unbound) - first
                merged: dict[int, str] = dict(assignment)
                for part in (first, rest):
                    proj = (
                        {v: incumbent[v] for v in part}
                        if incumbent is not None
                        else None
                    )
                    got = self._lds(
                        assignment, live, pitched, proj, part, n,
                        prune=prune, post=post, andor=andor,
                    )
                    if got is None:
                        return incumbent
                    for v in part:
                        merged[v] = got[v]
                return self._better(merged, incumbent, scope)

        self._tick()
        if prune and incumbent is not None:
            if self._bound(assignment, live, scope, pitched) >= self._scope_cost(
                incumbent, scope
            ):
                return incumbent
        if not unbound:
            leaf = dict(assignment)
            if self.on_leaf is not None:
                self.on_leaf(dict(leaf))
            cand = self._postprocess(leaf, scope) if post else leaf
            return self._better(cand, incumbent, scope)
        try:
            v, scores = heuristics.choose_branch(
                self.problem, assignment, live, pitched, among=scope
            )
        except heuristics.FailedState:
            return incumbent
        f = scores[0].value
        nxt = dict(assignment)
        nxt[v] = f
        res = forward_check(self.problem, nxt, v, live)
        if not res.failed:
            incumbent = self._lds(
                nxt, res.reduced, pitched, incumbent, scope, n,
                prune=prune, post=post, andor=andor,
            )
        if len(pitched) < n and (v, f) not in pitched:
            wider = pitched | {(v, f)}
            self.stats.discrepancies_used = max(self.stats.discrepancies_used, len(wider))
            incumbent = self._lds(
                assignment, live, wider, incumbent, scope, n,
                prune=prune, post=post, andor=andor,
            )
        return incumbent


def _finish(problem: Swcsp, best: dict[int, str] | None, stats: SearchStats, t0: float) -> SearchResult:
    stats.wall_ms = (time.monotonic() - t0) * 1000.0
    c = full_cost(problem, best)
    if best is not None:
        stats.best_cost = c
    return SearchResult(best, c, stats)


def solve_backtrack(problem: Swcsp, on_leaf=None) -> SearchResult:
    """First solution in heuristic order, or failure; no cost optimization."""
    t0 = time.monotonic()
    stats = SearchStats(algorithm="backtrack")
    engine = _Search(problem, stats, on_leaf=on_leaf)
    best = engine.backtrack()
    return _finish(problem, best, stats, t0)


def solve_bnb(problem: Swcsp, on_leaf=None) -> SearchResult:
    """Minimum-cost solution by branch and bound, or bottom when unsatisfiable."""
    t0 = time.monotonic()
    stats = SearchStats(algorithm="bnb")
    engine = _Search(problem, stats, on_leaf=on_leaf)
    best = engine.bnb()
    return _finish(problem, best, stats, t0)


def _run_lds_variant(problem, n, algorithm, *, prune, post, andor, on_leaf=None):
    t0 = time.monotonic()
    if n < 0:
        raise ConfigError("discrepancy limit must be >= 0")
    stats = SearchStats(algorithm=algorithm, n=n, iterations=1)
    engine = _Search(problem, stats, on_leaf=on_leaf)
    best = engine.lds(n, prune=prune, post=post, andor=andor)
    return _finish(problem, best, stats, t0)


def solve_lds(problem: Swcsp, n: int, on_leaf=None) -> SearchResult:
    """Limited discrepancy search with bound pruning at discrepancy limit n."""
    return _run_lds_variant(problem, n, "lds", prune=True, post=False, andor=False, on_leaf=on_leaf)


def solve_lds_post(problem: Swcsp, n: int, on_leaf=None) -> SearchResult:
    """LDS with postprocessed leaves and no bound pruning anywhere."""
    return _run_lds_variant(problem, n, "lds_post", prune=False, post=True, andor=False, on_leaf=on_leaf)


def solve_andor(problem: Swcsp, n: int, on_leaf=None) -> SearchResult:
    """lds_post plus independent solving of disconnected residual components."""
    return _run_lds_variant(problem, n, "andor", prune=False, post=True, andor=True, on_leaf=on_leaf)


def _solve_lds_bounded_post(problem: Swcsp, n: int) -> SearchResult:
    """Postprocessed leaves *with* bound pruning retained.

    Exists only to demonstrate why that combination is unsound as a search
    strategy (the pruning can discard the leaf whose postprocessing would
    have won); not part of the supported API.
    """
    return _run_lds_variant(problem, n, "lds_bounded_post", prune=True, post=True, andor=False)


def postprocess(problem: Swcsp, assignment: Bindings) -> dict[int, str]:
    """Improve a complete solution by repeated single-variable re-solves."""
    if set(problem.domains) - set(assignment):
        raise ProblemError("postprocess needs a complete solution")
    engine = _Search(problem, SearchStats(algorithm="post"))
    return engine._postprocess(assignment, problem.domains)


_FLAGS = {
    "lds": dict(prune=True, post=False, andor=False),
    "lds_post": dict(prune=False, post=True, andor=False),
    "andor": dict(prune=False, post=True, andor=True),
}


def certificate_limit(problem: Swcsp) -> int:
    """Discrepancy limit beyond which LDS provably returns the optimum."""
    if not problem.domains:
        return 0
    return problem.size * (max(len(d) for d in problem.domains.values()) - 1)


def run(problem: Swcsp, config: SearchConfig) -> SearchResult:
    """Driver: iterative deepening over discrepancy limits with termination.

    Stops on (a) wall-clock budget or stall, (b) a completed iteration with no
    cost improvement when so configured, or (c) the optimality certificate
    n >= k(|D|-1).  Deterministic given the problem and configuration.
    """
    config.validate()
    t0 = time.monotonic()
    stats = SearchStats(algorithm=config.algorithm)
    controller = _Controller(config.budget_seconds, config.stall_seconds)
    engine = _Search(problem, stats, controller)

    if config.algorithm in ("backtrack", "bnb"):
        try:
            best = engine.backtrack() if config.algorithm == "backtrack" else engine.bnb()
            stats.stopped_by = "complete"
        except _Stopped as stop:
            stats.stopped_by = stop.reason
            best = engine.best
        return _finish(problem, best, stats, t0)

    flags = _FLAGS[config.algorithm]
    cert = certificate_limit(problem)
    best: dict[int, str] | None = None
    if config.iterative:
        limits: Iterable[int] = iter(range(0, max(cert, 0) + 1))
    else:
        limits = [config.max_discrepancies]
    stats.stopped_by = "exhausted"
    for n in limits:
        stats.n = n
        stats.iterations += 1
        before = full_cost(problem, best)
        try:
            best = engine.lds(n, best, **flags)
        except _Stopped as stop:
            stats.stopped_by = stop.reason
            best = engine.best
            break
        if not config.iterative:
            stats.stopped_by = "complete"
            break
        if config.stop_on_no_improvement and not full_cost(problem, best) < before:
            stats.stopped_by = "no_improvement"
            break
        if n >= cert:
            stats.stopped_by = "optimal"
            break
    return _finish(problem, best, stats, t0)
