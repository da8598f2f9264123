"""Crossword front end: puzzle files, scoring, compilation, and grading."""

from .compile import CompiledPuzzle, CompileError, CrossingConstraint, compile_puzzle
from .evaluate import Grade, acpt_score, first_mistake_depth, grade_fills
from .grid import (
    Clue,
    Grid,
    Puzzle,
    PuzzleParseError,
    Slot,
    Violation,
    extract_slots,
    parse_puzzle,
    parse_solution_text,
    render_filled,
    render_puzzle,
    validate_puzzle,
)
from .lexicon import (
    CandidateStream,
    ClueDatabase,
    LexiconError,
    ScoredDictionary,
    ScorerConfig,
    fill_stream,
    load_clue_database,
    load_clue_database_file,
    load_dictionary,
    load_dictionary_file,
    normalize_clue,
    score_candidate,
)

__all__ = [
    "CandidateStream",
    "Clue",
    "ClueDatabase",
    "CompileError",
    "CompiledPuzzle",
    "CrossingConstraint",
    "Grade",
    "Grid",
    "LexiconError",
    "Puzzle",
    "PuzzleParseError",
    "ScoredDictionary",
    "ScorerConfig",
    "Slot",
    "Violation",
    "acpt_score",
    "compile_puzzle",
    "extract_slots",
    "fill_stream",
    "first_mistake_depth",
    "grade_fills",
    "load_clue_database",
    "load_clue_database_file",
    "load_dictionary",
    "load_dictionary_file",
    "normalize_clue",
    "parse_puzzle",
    "parse_solution_text",
    "render_filled",
    "render_puzzle",
    "score_candidate",
    "validate_puzzle",
]
