"""Data model for singly weighted constraint satisfaction problems.

A problem couples hard n-ary constraints with at most one unary cost table
per variable.  Problems and assignments are immutable after construction;
every operation that "changes" a problem returns a new one, so values can be
shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Protocol, runtime_checkable

INFINITY = math.inf

# A partial assignment is a plain mapping from variable id to token.  The
# distinguished inconsistent assignment (bottom) is represented by None and
# costs +inf.
Bindings = Mapping[int, str]

# Hook for problems whose real domains are too large to materialize: given a
# variable and the current bindings, produce extra candidate tokens that are
# consistent with the bound neighbors (used when a live domain empties).
FallbackFn = Callable[[int, Bindings], tuple[str, ...]]


class ProblemError(ValueError):
    """Malformed problem or out-of-contract argument."""


@runtime_checkable
class Constraint(Protocol):
    """Anything with an ordered scope and a tuple-admissibility test."""

    scope: tuple[int, ...]

    def allows(self, values: tuple[str, ...]) -> bool: ...


@dataclass(frozen=True)
class Variable:
    id: int
    name: str


@dataclass(frozen=True)
class HardConstraint:
    """Extensional constraint: ordered scope plus the set of allowed tuples."""

    scope: tuple[int, ...]
    allowed: frozenset[tuple[str, ...]]

    def allows(self, values: tuple[str, ...]) -> bool:
        return tuple(values) in self.allowed


@dataclass(frozen=True)
class ProjectedConstraint:
    """A non-extensional constraint with part of its scope pinned to values.

    Produced by restriction when the base constraint cannot be projected
    extensionally; admissibility is checked by rebuilding the full tuple.
    """

    base: Constraint
    fixed: tuple[tuple[int, str], ...]
    scope: tuple[int, ...]

    def allows(self, values: tuple[str, ...]) -> bool:
        bound = dict(self.fixed)
        bound.update(zip(self.scope, values))
        return self.base.allows(tuple(bound[v] for v in self.base.scope))


@dataclass(frozen=True)
class UnaryCost:
    """Non-negative cost table for one variable's values.

    Tokens absent from the table cost `default`; the default exists so that
    problems with huge implicit domains can price never-materialized values.
    """

    var: int
    table: Mapping[str, float]
    default: float = 0.0

    def cost(self, token: str) -> float:
        return self.table.get(token, self.default)


@dataclass(frozen=True)
class Swcsp:
    """A singly weighted CSP: variables, domains, hard constraints, unary costs."""

    variables: tuple[Variable, ...]
    domains: Mapping[int, tuple[str, ...]]
    hard: tuple[Constraint, ...] = ()
    soft: Mapping[int, UnaryCost] = field(default_factory=dict)
    fallback_fills: FallbackFn | None = None
    _adjacency: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        ids = [v.id for v in self.variables]
        if len(set(ids)) != len(ids):
            raise ProblemError("duplicate variable ids")
        known = set(ids)
        if set(self.domains) != known:
            raise ProblemError("domains must cover exactly the declared variables")
        for vid, dom in self.domains.items():
            if not dom:
                raise ProblemError(f"empty domain for variable {vid}")
            if len(set(dom)) != len(dom):
                raise ProblemError(f"duplicate domain tokens for variable {vid}")
        for c in self.hard:
            if len(set(c.scope)) != len(c.scope):
                raise ProblemError("constraint scope has duplicate variables")
            if not set(c.scope) <= known:
                raise ProblemError("constraint scope mentions unknown variable")
            if isinstance(c, HardConstraint):
                for t in c.allowed:
                    if len(t) != len(c.scope):
                        raise ProblemError("tuple arity does not match scope")
                    for vid, tok in zip(c.scope, t):
                        if tok not in self.domains[vid]:
                            raise ProblemError(
                                f"tuple value {tok!r} outside domain of variable {vid}"
                            )
        for vid, uc in self.soft.items():
            if vid not in known or uc.var != vid:
                raise ProblemError("unary cost attached to unknown variable")
            for tok, c in uc.table.items():
                if not (c >= 0) or math.isinf(c):
                    raise ProblemError(f"negative or infinite cost for {tok!r}")
            if not (uc.default >= 0) or math.isinf(uc.default):
                raise ProblemError("default cost must be a finite non-negative real")
        adjacency: dict[int, dict[int, list[int]]] = {vid: {} for vid in ids}
        for ci, c in enumerate(self.hard):
            for v in c.scope:
                for u in c.scope:
                    if u != v:
                        adjacency[v].setdefault(u, []).append(ci)
        object.__setattr__(self, "_adjacency", adjacency)

    @property
    def size(self) -> int:
        return len(self.variables)

    @property
    def var_ids(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.variables)

    def variable(self, vid: int) -> Variable:
        for v in self.variables:
            if v.id == vid:
                return v
        raise ProblemError(f"unknown variable {vid}")

    def neighbors(self, vid: int) -> tuple[int, ...]:
        """Variables sharing at least one hard constraint with vid."""
        return tuple(sorted(self._adjacency[vid]))

    def links(self, vid: int, other: int) -> tuple[int, ...]:
        """Indices into `hard` of the constraints joining vid and other."""
        return tuple(self._adjacency[vid].get(other, ()))

    def constraints_of(self, vid: int) -> tuple[int, ...]:
        """Indices into `hard` of every constraint mentioning vid."""
        return tuple(
            sorted({ci for cis in self._adjacency[vid].values() for ci in cis}
                   | {ci for ci, c in enumerate(self.hard) if c.scope == (vid,)})
        )

    def unary_cost(self, vid: int, token: str) -> float:
        uc = self.soft.get(vid)
        return uc.cost(token) if uc is not None else 0.0

    def min_unary_cost(self, vid: int, tokens: Iterable[str]) -> float:
        """Cheapest cost among tokens; implicit domains also admit the default."""
        uc = self.soft.get(vid)
        if uc is None:
            return 0.0
        best = min((uc.cost(t) for t in tokens), default=INFINITY)
        if self.fallback_fills is not None:
            best = min(best, uc.default)
        return best


def build_problem(
    names: Iterable[str],
    domains: Iterable[Iterable[str]],
    hard: Iterable[Constraint] = (),
    soft: Mapping[int, UnaryCost] | Iterable[UnaryCost] = (),
    fallback_fills: FallbackFn | None = None,
) -> Swcsp:
    """Construct a problem with dense variable ids 0..n-1."""
    variables = tuple(Variable(i, n) for i, n in enumerate(names))
    dom_map = {i: tuple(d) for i, d in enumerate(domains)}
    if len(dom_map) != len(variables):
        raise ProblemError("one domain required per variable")
    if not isinstance(soft, Mapping):
        soft = {uc.var: uc for uc in soft}
    return Swcsp(variables, dom_map, tuple(hard), dict(soft), fallback_fills)


def _project_extensional(c: HardConstraint, v: int, x: str) -> HardConstraint | None:
    pos = c.scope.index(v)
    new_scope = c.scope[:pos] + c.scope[pos + 1 :]
    tuples = frozenset(
        t[:pos] + t[pos + 1 :] for t in c.allowed if t[pos] == x
    )
    if not new_scope and tuples:
        return None  # satisfied nullary constraint: drop
    return HardConstraint(new_scope, tuples)


def _project_intensional(c: Constraint, v: int, x: str) -> Constraint | None:
    if isinstance(c, ProjectedConstraint):
        base, fixed = c.base, dict(c.fixed)
    else:
        base, fixed = c, {}
    fixed[v] = x
    new_scope = tuple(u for u in c.scope if u != v)
    if not new_scope:
        full = tuple(fixed[u] for u in base.scope)
        if base.allows(full):
            return None
        return HardConstraint((), frozenset())
    return ProjectedConstraint(base, tuple(sorted(fixed.items())), new_scope)


def restrict(problem: Swcsp, v: int, x: str) -> Swcsp:
    """The problem obtained by committing v = x and dropping v.

    Constraints not mentioning v are unchanged; constraints mentioning v keep
    only the tuples compatible with the commitment, projected onto the
    remaining scope.
    """
    if v not in problem.domains:
        raise ProblemError(f"unknown variable {v}")
    if x not in problem.domains[v]:
        raise ProblemError(f"value {x!r} not in domain of variable {v}")
    new_hard: list[Constraint] = []
    for c in problem.hard:
        if v not in c.scope:
            new_hard.append(c)
            continue
        if isinstance(c, HardConstraint):
            projected = _project_extensional(c, v, x)
        else:
            projected = _project_intensional(c, v, x)
        if projected is not None:
            new_hard.append(projected)
    return Swcsp(
        variables=tuple(w for w in problem.variables if w.id != v),
        domains={u: d for u, d in problem.domains.items() if u != v},
        hard=tuple(new_hard),
        soft={u: s for u, s in problem.soft.items() if u != v},
        fallback_fills=problem.fallback_fills,
    )


def restrict_all(problem: Swcsp, assignment: Bindings) -> Swcsp:
    """Compose `restrict` over every binding; the result is order independent."""
    out = problem
    for v in sorted(assignment):
        out = restrict(out, v, assignment[v])
    return out


def cost(problem: Swcsp, assignment: Bindings | None) -> float:
    """Cost of a partial assignment: a lower bound on the cost of any extension.

    Bound variables contribute their table cost; unbound variables contribute
    the minimum cost over their domain.  The inconsistent assignment costs
    +inf.
    """
    if assignment is None:
        return INFINITY
    known = set(problem.domains)
    if not set(assignment) <= known:
        raise ProblemError("assignment binds variables outside the problem")
    total = 0.0
    for vid, uc in problem.soft.items():
        if vid in assignment:
            total += uc.cost(assignment[vid])
        else:
            total += problem.min_unary_cost(vid, problem.domains[vid])
    return total


def is_solution(problem: Swcsp, assignment: Bindings | None) -> bool:
    """True iff every variable is bound and every hard constraint holds."""
    if assignment is None:
        return False
    if set(problem.domains) - set(assignment):
        return False
    for c in problem.hard:
        try:
            values = tuple(assignment[v] for v in c.scope)
        except KeyError:
            return False
        if not c.allows(values):
            return False
    return True


def _components(problem: Swcsp) -> list[list[int]]:
    seen: set[int] = set()
    comps: list[list[int]] = []
    for start in sorted(problem.domains):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for u in problem.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    comp.append(u)
                    frontier.append(u)
        comps.append(sorted(comp))
    return comps


def split(problem: Swcsp) -> tuple[Swcsp, Swcsp] | None:
    """Split off one connected component of the constraint graph, if any.

    Returns (component containing the lowest variable id, remainder), or None
    when the problem is connected.  Recursive splitting is left to callers.
    """
    comps = _components(problem)
    if len(comps) < 2:
        return None
    left = set(comps[0])

    def side(vids: set[int], take_nullary: bool) -> Swcsp:
        def belongs(c: Constraint) -> bool:
            if not c.scope:
                return take_nullary  # nullary constraints ride with the left side
            return set(c.scope) <= vids

        return Swcsp(
            variables=tuple(v for v in problem.variables if v.id in vids),
            domains={u: d for u, d in problem.domains.items() if u in vids},
            hard=tuple(c for c in problem.hard if belongs(c)),
            soft={u: s for u, s in problem.soft.items() if u in vids},
            fallback_fills=problem.fallback_fills,
        )

    right = set(problem.domains) - left
    return side(left, True), side(right, False)


def canonical_form(problem: Swcsp):
    """Order-insensitive structural fingerprint (extensional problems only).

    Two problems are structurally equal when their canonical forms compare
    equal: constraint scopes are sorted and tuple sets permuted accordingly.
    """
    cons = []
    for c in problem.hard:
        if not isinstance(c, HardConstraint):
            raise ProblemError("canonical_form requires extensional constraints")
        order = sorted(range(len(c.scope)), key=lambda i: c.scope[i])
        scope = tuple(c.scope[i] for i in order)
        tuples = tuple(sorted(tuple(t[i] for i in order) for t in c.allowed))
        cons.append((scope, tuples))
    return (
        tuple(sorted((v.id, v.name) for v in problem.variables)),
        tuple(sorted((vid, problem.domains[vid]) for vid in problem.domains)),
        tuple(sorted(cons)),
        tuple(
            sorted(
                (vid, tuple(sorted(uc.table.items())), uc.default)
                for vid, uc in problem.soft.items()
            )
        ),
    )
