"""Shared fixtures: random problem generators and brute-force oracles."""

from __future__ import annotations

import itertools
import math
import random
from pathlib import Path

import pytest

from gridfill import HardConstraint, Swcsp, UnaryCost, build_problem

TOKENS = "abcdefgh"

TOYS = Path(__file__).resolve().parent.parent / "src" / "gridfill" / "crossword" / "toys"


def t1() -> Swcsp:
    """Two variables over {a, b}, equality constraint, costs 1/0 and 0/3."""
    return build_problem(
        ["v1", "v2"],
        [["a", "b"], ["a", "b"]],
        [HardConstraint((0, 1), frozenset({("a", "a"), ("b", "b")}))],
        {
            0: UnaryCost(0, {"a": 1.0, "b": 0.0}),
            1: UnaryCost(1, {"a": 0.0, "b": 3.0}),
        },
    )


def random_problem(
    rng: random.Random,
    max_vars: int = 8,
    max_dom: int = 4,
    min_vars: int = 2,
    min_dom: int = 2,
    density: float = 0.5,
    constraint_factor: float = 1.0,
    plant: bool = True,
    cost_range: tuple[int, int] = (0, 10),
    constraint_free: bool = False,
) -> Swcsp:
    """Random binary SWCSP with integer-valued costs.

    When `plant` is set, a random complete assignment is wired into every
    constraint so the instance is guaranteed satisfiable.
    """
    k = rng.randint(min_vars, max_vars)
    domains = [
        [TOKENS[i] for i in range(rng.randint(min_dom, max_dom))] for _ in range(k)
    ]
    planted = [rng.choice(domains[v]) for v in range(k)]
    hard = []
    if not constraint_free and k >= 2:
        n_constraints = rng.randint(1, max(1, int(k * constraint_factor)))
        for _ in range(n_constraints):
            u, v = rng.sample(range(k), 2)
            allowed = {
                pair
                for pair in itertools.product(domains[u], domains[v])
                if rng.random() < density
            }
            if plant:
                allowed.add((planted[u], planted[v]))
            if not allowed:
                allowed.add((domains[u][0], domains[v][0]))
            hard.append(HardConstraint((u, v), frozenset(allowed)))
    soft = {
        v: UnaryCost(
            v,
            {tok: float(rng.randint(*cost_range)) for tok in domains[v]},
            0.0,
        )
        for v in range(k)
    }
    return build_problem([f"x{i}" for i in range(k)], domains, hard, soft)


def brute_force_solutions(problem: Swcsp) -> list[dict[int, str]]:
    """Every complete assignment satisfying all hard constraints."""
    ids = sorted(problem.domains)
    out = []
    for combo in itertools.product(*(problem.domains[v] for v in ids)):
        assignment = dict(zip(ids, combo))
        if all(
            c.allows(tuple(assignment[v] for v in c.scope)) for c in problem.hard
        ):
            out.append(assignment)
    return out


def brute_force_optimum(problem: Swcsp) -> tuple[dict[int, str] | None, float]:
    """Exhaustive minimum-cost solution (the acceptance oracle)."""
    best, best_cost = None, math.inf
    for assignment in brute_force_solutions(problem):
        c = sum(problem.unary_cost(v, tok) for v, tok in assignment.items())
        if c < best_cost:
            best, best_cost = assignment, c
    return best, best_cost


def random_partial(rng: random.Random, problem: Swcsp, solution=None) -> dict[int, str]:
    """Random partial assignment, optionally a sub-assignment of `solution`."""
    ids = sorted(problem.domains)
    size = rng.randint(0, len(ids))
    chosen = rng.sample(ids, size)
    if solution is not None:
        return {v: solution[v] for v in chosen}
    return {v: rng.choice(problem.domains[v]) for v in chosen}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1729)
