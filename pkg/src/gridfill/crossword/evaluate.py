"""Grading solved grids: tournament points, accuracy counts, first mistake."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .. import heuristics
from ..model import INFINITY
from ..propagate import forward_check, initial_live
from .compile import CompiledPuzzle
from .grid import Puzzle


def acpt_score(
    correct_words: int,
    incorrect_letters: int,
    full_minutes_remaining: int,
    perfect: bool,
) -> int:
    """Tournament points: 10 per correct word, 25 per full remaining minute
    less 25 per wrong letter (never negative), 150 for a perfect grid."""
    if min(correct_words, incorrect_letters, full_minutes_remaining) < 0:
        raise ValueError("acpt_score takes non-negative counts")
    time_bonus = max(0, 25 * (full_minutes_remaining - incorrect_letters))
    return 10 * correct_words + time_bonus + (150 if perfect else 0)


@dataclass(frozen=True)
class Grade:
    words_correct: int
    words_total: int
    letters_correct: int
    letters_wrong: int
    letters_total: int

    @property
    def perfect(self) -> bool:
        return self.letters_wrong == 0 and self.letters_correct == self.letters_total


def grade_fills(puzzle: Puzzle, fills: Mapping[int, str]) -> Grade:
    """Compare filled words and letters against the puzzle's answer key."""
    key = puzzle.key_fills()
    if key is None:
        raise ValueError("puzzle has no solution to grade against")
    words_correct = sum(1 for s in puzzle.slots if fills.get(s.id) == key[s.id])
    letters = {}
    for s in puzzle.slots:
        word = fills.get(s.id)
        for pos, cell in enumerate(s.cells):
            if word is not None and pos < len(word):
                letters[cell] = word[pos]
    sol = puzzle.solution or {}
    total = len(puzzle.grid.open_cells())
    correct = sum(1 for cell, ch in letters.items() if sol.get(cell) == ch)
    wrong = total - correct
    return Grade(words_correct, len(puzzle.slots), correct, wrong, total)


def _local_choice(problem, assignment, live):
    """Variable and value by table cost alone, ignoring neighbor damage."""
    best_var, best_gap = None, -INFINITY
    for v in sorted(problem.domains):
        if v in assignment:
            continue
        values = live[v]
        if not values:
            return None
        if len(values) == 1:
            gap = INFINITY
        else:
            costs = sorted(problem.unary_cost(v, y) for y in values)
            gap = costs[1] - costs[0]
        if best_var is None or gap > best_gap:
            best_var, best_gap = v, gap
    choice = min(live[best_var], key=lambda y: (problem.unary_cost(best_var, y), y))
    return best_var, choice


def first_mistake_depth(
    compiled: CompiledPuzzle,
    key_fills: Mapping[int, str] | None = None,
    value_order: str = "damage",
) -> int:
    """Consecutive correct fills in a pure heuristic dive (no discrepancies).

    Replays variable and value selection with forward checking and counts
    slots filled before the first choice that disagrees with the answer key.
    `value_order` is "damage" for the full one-level-lookahead ordering or
    "local" for ordering by a fill's own cost only.
    """
    if value_order not in ("damage", "local"):
        raise ValueError(f"unknown value order {value_order!r}")
    key = dict(key_fills) if key_fills is not None else compiled.key_assignment()
    if key is None:
        raise ValueError("no answer key available")
    problem = compiled.problem
    assignment: dict[int, str] = {}
    live = initial_live(problem)
    count = 0
    while len(assignment) < problem.size:
        if value_order == "damage":
            try:
                v, scores = heuristics.choose_branch(problem, assignment, live)
            except heuristics.FailedState:
                return count
            choice = scores[0].value
        else:
            picked = _local_choice(problem, assignment, live)
            if picked is None:
                return count
            v, choice = picked
        if choice != key.get(v):
            return count
        assignment[v] = choice
        count += 1
        result = forward_check(problem, assignment, v, live)
        if result.failed:
            return count
        live = result.reduced
    return count
