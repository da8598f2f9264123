"""Compile a parsed puzzle into a singly weighted CSP.

One variable per slot; one crossing-letter constraint per open cell; unary
costs from the candidate stream.  Slot domains are implicit (all strings of
the right length), so each variable materializes only a cost-ordered stream
prefix, and a fallback hook supplies the pattern-forced string when crossing
bindings pin every cell of a slot whose live set has emptied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..model import Swcsp, UnaryCost, Variable
from .grid import Grid, Puzzle, Slot, Violation, render_filled, validate_puzzle
from .lexicon import (
    FREE,
    CandidateStream,
    ClueDatabase,
    ScoredDictionary,
    ScorerConfig,
    fill_stream,
)


class CompileError(ValueError):
    def __init__(self, violations: list[Violation]) -> None:
        lines = "; ".join(v.message for v in violations)
        super().__init__(f"puzzle does not compile: {lines}")
        self.violations = violations


@dataclass(frozen=True)
class CrossingConstraint:
    """Letter equality where an across and a down slot share a cell."""

    scope: tuple[int, int]  # (across variable, down variable)
    positions: tuple[int, int]  # cell index within each word
    cell: tuple[int, int]

    def allows(self, values: tuple[str, ...]) -> bool:
        a, d = values
        return a[self.positions[0]] == d[self.positions[1]]

    def support_key(self, var: int, value: str) -> str:
        """The single letter that filtering the other side depends on."""
        i = self.scope.index(var)
        return value[self.positions[i]]


@dataclass(frozen=True)
class CompiledPuzzle:
    problem: Swcsp
    puzzle: Puzzle
    streams: Mapping[int, CandidateStream]
    config: ScorerConfig
    warnings: tuple[Violation, ...] = ()

    def key_assignment(self) -> dict[int, str] | None:
        return self.puzzle.key_fills()

    def render(self, fills: Mapping[int, str]) -> str:
        return render_filled(self.puzzle.grid, self.puzzle.slots, fills)


def _cell_index(slots: tuple[Slot, ...]) -> dict[tuple[int, int], dict[str, tuple[int, int]]]:
    """cell -> direction -> (slot id, position of the cell in that slot)."""
    index: dict[tuple[int, int], dict[str, tuple[int, int]]] = {}
    for s in slots:
        for pos, cell in enumerate(s.cells):
            index.setdefault(cell, {})[s.direction] = (s.id, pos)
    return index


def compile_puzzle(
    puzzle: Puzzle,
    dictionary: ScoredDictionary,
    db: ClueDatabase,
    config: ScorerConfig | None = None,
) -> CompiledPuzzle:
    config = config or ScorerConfig()
    config.validate()
    violations = validate_puzzle(puzzle.grid, puzzle.slots)
    errors = [v for v in violations if v.severity == "error"]
    if errors:
        raise CompileError(errors)
    warnings = tuple(v for v in violations if v.severity == "warning")

    variables = tuple(Variable(s.id, s.label) for s in puzzle.slots)
    streams: dict[int, CandidateStream] = {}
    domains: dict[int, tuple[str, ...]] = {}
    soft: dict[int, UnaryCost] = {}
    for s in puzzle.slots:
        stream = fill_stream(
            s.id, FREE * s.length, dictionary, db, puzzle.clues[s.id], config
        )
        prefix = list(stream)  # materialize up to the candidate cap
        streams[s.id] = stream
        if not prefix:
            # Nothing in the dictionary fits the slot; admit one arbitrary
            # filler so the variable keeps a nonempty (floor-cost) domain.
            prefix = [("A" * s.length, config.floor_cost)]
        domains[s.id] = tuple(w for w, _ in prefix)
        soft[s.id] = UnaryCost(s.id, {w: c for w, c in prefix}, config.floor_cost)

    index = _cell_index(puzzle.slots)
    crossings: list[CrossingConstraint] = []
    cross_info: dict[int, list[tuple[int, int, int]]] = {s.id: [] for s in puzzle.slots}
    for cell in sorted(index):
        owners = index[cell]
        if "across" in owners and "down" in owners:
            a_var, a_pos = owners["across"]
            d_var, d_pos = owners["down"]
            crossings.append(CrossingConstraint((a_var, d_var), (a_pos, d_pos), cell))
            cross_info[a_var].append((a_pos, d_var, d_pos))
            cross_info[d_var].append((d_pos, a_var, a_pos))

    lengths = {s.id: s.length for s in puzzle.slots}

    def fallback(var: int, bindings) -> tuple[str, ...]:
        pattern = [FREE] * lengths[var]
        for pos, other, opos in cross_info[var]:
            if other in bindings:
                pattern[pos] = bindings[other][opos]
        if FREE in pattern:
            return ()
        return ("".join(pattern),)

    problem = Swcsp(variables, domains, tuple(crossings), soft, fallback)
    return CompiledPuzzle(problem, puzzle, streams, config, warnings)
