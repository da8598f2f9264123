"""Crossword grids, slots, clues, and the puzzle text format.

Puzzle files are UTF-8 text with section headers GRID / ACROSS / DOWN and an
optional SOLUTION.  Grid rows use '#' for a block and '.' for an open cell;
letters may appear in place of '.' to carry a solution inline.  Clue lines
are "<number> <clue text>".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

BLOCK = "#"
OPEN = "."

_GLYPHS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZ") | {BLOCK, OPEN}


class PuzzleParseError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


@dataclass(frozen=True)
class Grid:
    height: int
    width: int
    rows: tuple[str, ...]  # '#' or '.' per cell

    def is_block(self, r: int, c: int) -> bool:
        return self.rows[r][c] == BLOCK

    def open_cells(self) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r in range(self.height)
            for c in range(self.width)
            if not self.is_block(r, c)
        ]

    def symmetric(self) -> bool:
        """Block pattern preserved under a 180-degree rotation."""
        for r in range(self.height):
            for c in range(self.width):
                mirrored = self.rows[self.height - 1 - r][self.width - 1 - c] == BLOCK
                if (self.rows[r][c] == BLOCK) != mirrored:
                    return False
        return True


@dataclass(frozen=True)
class Slot:
    id: int
    number: int
    direction: str  # "across" | "down"
    cells: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.cells)

    @property
    def label(self) -> str:
        return f"{self.number}{'A' if self.direction == 'across' else 'D'}"


@dataclass(frozen=True)
class Clue:
    slot: int
    text: str
    normalized: str


@dataclass(frozen=True)
class Violation:
    kind: str  # short-run | coverage | disconnected | asymmetric
    severity: str  # error | warning
    message: str


@dataclass(frozen=True)
class Puzzle:
    grid: Grid
    slots: tuple[Slot, ...]
    clues: Mapping[int, Clue]
    solution: Mapping[tuple[int, int], str] | None = None

    def slot_by_label(self, label: str) -> Slot:
        for s in self.slots:
            if s.label == label:
                return s
        raise KeyError(label)

    def key_fills(self) -> dict[int, str] | None:
        """Per-slot answer words read off the solution grid, if present."""
        if self.solution is None:
            return None
        return {
            s.id: "".join(self.solution[cell] for cell in s.cells) for s in self.slots
        }


def _runs(grid: Grid, direction: str) -> list[list[tuple[int, int]]]:
    """Maximal horizontal or vertical runs of open cells (any length)."""
    runs = []
    if direction == "across":
        lines = [[(r, c) for c in range(grid.width)] for r in range(grid.height)]
    else:
        lines = [[(r, c) for r in range(grid.height)] for c in range(grid.width)]
    for line in lines:
        current: list[tuple[int, int]] = []
        for cell in line:
            if grid.is_block(*cell):
                if current:
                    runs.append(current)
                current = []
            else:
                current.append(cell)
        if current:
            runs.append(current)
    return runs


def _active_directions(grid: Grid) -> tuple[str, ...]:
    # A single-row (or single-column) grid has words only along its long axis.
    if grid.height == 1 and grid.width == 1:
        return ()
    if grid.height == 1:
        return ("across",)
    if grid.width == 1:
        return ("down",)
    return ("across", "down")


def extract_slots(grid: Grid) -> tuple[Slot, ...]:
    """Slots are maximal open runs of length >= 2, numbered the standard way."""
    by_dir = {
        d: [run for run in _runs(grid, d) if len(run) >= 2]
        for d in _active_directions(grid)
    }
    start_cells = {run[0] for runs in by_dir.values() for run in runs}
    starts: dict[tuple[int, int], int] = {}
    number = 0
    for r in range(grid.height):
        for c in range(grid.width):
            if (r, c) in start_cells:
                number += 1
                starts[(r, c)] = number
    slots: list[Slot] = []
    for direction in ("across", "down"):
        for run in sorted(by_dir.get(direction, []), key=lambda run: starts[run[0]]):
            slots.append(Slot(len(slots), starts[run[0]], direction, tuple(run)))
    return tuple(slots)


def validate_puzzle(grid: Grid, slots: Iterable[Slot]) -> list[Violation]:
    """Structural checks; violations are data, not exceptions.

    Short runs and coverage gaps are errors, asymmetry is only a warning
    (real puzzles occasionally break it).  Degenerate one-line grids skip the
    two-words-per-cell rule, which cannot apply to them.
    """
    slots = list(slots)
    out: list[Violation] = []
    directions = _active_directions(grid)
    for d in directions:
        for run in _runs(grid, d):
            if len(run) < 3:
                out.append(
                    Violation(
                        "short-run",
                        "error",
                        f"{d} run of length {len(run)} at {run[0]} (minimum is 3)",
                    )
                )
    open_cells = grid.open_cells()
    if open_cells:
        seen = {open_cells[0]}
        stack = [open_cells[0]]
        while stack:
            r, c = stack.pop()
            for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if 0 <= nr < grid.height and 0 <= nc < grid.width:
                    if not grid.is_block(nr, nc) and (nr, nc) not in seen:
                        seen.add((nr, nc))
                        stack.append((nr, nc))
        if len(seen) != len(open_cells):
            out.append(
                Violation(
                    "disconnected",
                    "error",
                    f"{len(open_cells) - len(seen)} open cell(s) unreachable from {open_cells[0]}",
                )
            )
    if not grid.symmetric():
        out.append(
            Violation("asymmetric", "warning", "block pattern is not 180-degree symmetric")
        )
    if len(directions) == 2:
        cover: dict[tuple[int, int], int] = {cell: 0 for cell in open_cells}
        for s in slots:
            for cell in s.cells:
                cover[cell] += 1
        for cell in sorted(cover):
            if cover[cell] < 2:
                out.append(
                    Violation(
                        "coverage",
                        "error",
                        f"open cell {cell} is covered by {cover[cell]} slot(s), needs 2",
                    )
                )
    return out


def _normalize_row(raw: str) -> str:
    return "".join(raw.split()).upper()


def parse_puzzle(text: str) -> Puzzle:
    sections: dict[str, list[tuple[int, str]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.upper() in ("GRID", "ACROSS", "DOWN", "SOLUTION"):
            current = stripped.upper()
            if current in sections:
                raise PuzzleParseError(f"duplicate section {current}", lineno)
            sections[current] = []
            continue
        if current is None:
            raise PuzzleParseError(f"content before any section header: {stripped!r}", lineno)
        sections[current].append((lineno, stripped))

    if "GRID" not in sections or not sections["GRID"]:
        raise PuzzleParseError("missing GRID section")

    grid_rows: list[str] = []
    inline_letters: dict[tuple[int, int], str] = {}
    width: int | None = None
    for r, (lineno, raw) in enumerate(sections["GRID"]):
        row = _normalize_row(raw)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise PuzzleParseError(
                f"ragged grid row: expected {width} cells, got {len(row)}", lineno
            )
        for c, glyph in enumerate(row):
            if glyph not in _GLYPHS:
                raise PuzzleParseError(f"unknown cell glyph {glyph!r}", lineno)
            if glyph not in (BLOCK, OPEN):
                inline_letters[(r, c)] = glyph
        grid_rows.append(
            row.translate(str.maketrans({ch: OPEN for ch in "ABCDEFGHIJKLMNOPQRSTUVWXYZ"}))
        )
    grid = Grid(len(grid_rows), width or 0, tuple(grid_rows))
    slots = extract_slots(grid)

    from .lexicon import normalize_clue  # local import to avoid a cycle

    clues: dict[int, Clue] = {}
    by_number = {(s.number, s.direction): s for s in slots}
    for direction, header in (("across", "ACROSS"), ("down", "DOWN")):
        for lineno, raw in sections.get(header, []):
            parts = raw.split(None, 1)
            if len(parts) != 2 or not parts[0].isdigit():
                raise PuzzleParseError(f"malformed clue line {raw!r}", lineno)
            number = int(parts[0])
            slot = by_number.get((number, direction))
            if slot is None:
                raise PuzzleParseError(
                    f"clue for nonexistent slot {number} {direction}", lineno
                )
            if slot.id in clues:
                raise PuzzleParseError(
                    f"duplicate clue for slot {number} {direction}", lineno
                )
            clues[slot.id] = Clue(slot.id, parts[1], normalize_clue(parts[1]))
    for s in slots:
        if s.id not in clues:
            raise PuzzleParseError(
                f"missing clue for slot {s.label}",
                sections["GRID"][0][0],
            )

    solution: dict[tuple[int, int], str] | None = None
    if "SOLUTION" in sections:
        solution = _parse_solution_rows(sections["SOLUTION"], grid)
    elif inline_letters:
        missing = [cell for cell in grid.open_cells() if cell not in inline_letters]
        if missing:
            raise PuzzleParseError(
                f"inline solution letters must cover every open cell; {missing[0]} is bare",
                sections["GRID"][0][0],
            )
        solution = inline_letters
    if solution is not None and inline_letters:
        for cell, letter in inline_letters.items():
            if solution[cell] != letter:
                raise PuzzleParseError(
                    f"solution disagrees with inline grid letter at {cell}"
                )

    return Puzzle(grid, slots, clues, solution)


def _parse_solution_rows(rows: list[tuple[int, str]], grid: Grid) -> dict[tuple[int, int], str]:
    if len(rows) != grid.height:
        raise PuzzleParseError(
            f"solution has {len(rows)} rows, grid has {grid.height}",
            rows[0][0] if rows else None,
        )
    letters: dict[tuple[int, int], str] = {}
    for r, (lineno, raw) in enumerate(rows):
        row = _normalize_row(raw)
        if len(row) != grid.width:
            raise PuzzleParseError("ragged solution row", lineno)
        for c, glyph in enumerate(row):
            if grid.is_block(r, c):
                if glyph != BLOCK:
                    raise PuzzleParseError(
                        f"solution marks ({r}, {c}) open but the grid has a block", lineno
                    )
            elif glyph == BLOCK:
                raise PuzzleParseError(
                    f"solution marks ({r}, {c}) as a block but the grid is open", lineno
                )
            elif glyph == OPEN:
                raise PuzzleParseError(
                    f"solution leaves open cell ({r}, {c}) unfilled", lineno
                )
            else:
                letters[(r, c)] = glyph
    return letters


def parse_solution_text(text: str, grid: Grid) -> dict[tuple[int, int], str]:
    """Parse a bare block of SOLUTION-style rows against a known grid."""
    rows = [
        (lineno, line.strip())
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip() and line.strip().upper() != "SOLUTION"
    ]
    return _parse_solution_rows(rows, grid)


def render_filled(grid: Grid, slots: Iterable[Slot], fills: Mapping[int, str]) -> str:
    """The grid with slot fills substituted; parses back as a SOLUTION section."""
    cells = [list(row) for row in grid.rows]
    for s in slots:
        word = fills.get(s.id)
        if word is None:
            continue
        for (r, c), letter in zip(s.cells, word):
            cells[r][c] = letter
    return "\n".join("".join(row) for row in cells)


def render_puzzle(puzzle: Puzzle) -> str:
    """Serialize a puzzle; parsing the result reproduces the same structure."""
    out = ["GRID"]
    out.extend(puzzle.grid.rows)
    for direction, header in (("across", "ACROSS"), ("down", "DOWN")):
        lines = [
            f"{s.number} {puzzle.clues[s.id].text}"
            for s in puzzle.slots
            if s.direction == direction
        ]
        if lines:
            out.append(header)
            out.extend(lines)
    if puzzle.solution is not None:
        out.append("SOLUTION")
        rows = []
        for r in range(puzzle.grid.height):
            rows.append(
                "".join(
                    BLOCK if puzzle.grid.is_block(r, c) else puzzle.solution[(r, c)]
                    for c in range(puzzle.grid.width)
                )
            )
        out.extend(rows)
    return "\n".join(out) + "\n"
