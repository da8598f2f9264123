import itertools
import math

import pytest

from gridfill import cost, initial_live, is_solution, solve_bnb
from gridfill.crossword import (
    CompileError,
    ScorerConfig,
    compile_puzzle,
    load_clue_database,
    load_dictionary,
    parse_puzzle,
)
from gridfill.propagate import forward_check

SQUARE3 = """GRID
...
...
...
ACROSS
1 feline friend
4 form of to be
5 four plus six
DOWN
1 feline headed down
2 to be downward
3 ten downward
SOLUTION
CAT
ARE
TEN
"""


def square3():
    puzzle = parse_puzzle(SQUARE3)
    dictionary = load_dictionary(
        "CAT\t0.9\nARE\t0.8\nTEN\t0.7\nCOT\t0.6\nAGE\t0.5\nTOT\t0.4\n"
        "CAR\t0.6\nERA\t0.5\nNET\t0.4\n"
    )
    db = load_clue_database(
        "feline friend\tCAT\t40\nform of to be\tARE\t40\nfour plus six\tTEN\t40\n"
        "feline headed down\tCAT\t40\nto be downward\tARE\t40\nten downward\tTEN\t40\n"
    )
    return puzzle, dictionary, db, ScorerConfig(candidate_cap=60)


def test_single_slot_puzzle_compiles_to_one_variable():
    puzzle = parse_puzzle("GRID\n.....\nACROSS\n1 lonely\n")
    dictionary = load_dictionary("GRIND\t0.9\nGREAT\t0.5\n")
    db = load_clue_database("lonely\tGRIND\t5\n")
    compiled = compile_puzzle(puzzle, dictionary, db, ScorerConfig())
    assert compiled.problem.size == 1
    assert len(compiled.problem.hard) == 0


def test_3x3_has_six_variables_nine_crossings():
    puzzle, dictionary, db, cfg = square3()
    compiled = compile_puzzle(puzzle, dictionary, db, cfg)
    assert compiled.problem.size == 6
    assert len(compiled.problem.hard) == len(puzzle.grid.open_cells()) == 9


def test_invalid_puzzle_rejected_with_coordinates():
    bad = parse_puzzle(
        "GRID\n...\n.#.\n...\n"
        "ACROSS\n1 top\n3 bottom\nDOWN\n1 left\n2 right\n"
    )
    _, dictionary, db, cfg = square3()
    with pytest.raises(CompileError) as err:
        compile_puzzle(bad, dictionary, db, cfg)
    assert "(" in str(err.value)  # violations carry cell coordinates
    assert err.value.violations


def test_probability_product_equivalence():
    # Maximizing the probability product over legal fills picks the same
    # assignment as minimizing the compiled cost sum.
    puzzle, dictionary, db, cfg = square3()
    compiled = compile_puzzle(puzzle, dictionary, db, cfg)
    problem = compiled.problem
    ids = sorted(problem.domains)
    best_cost, by_cost = math.inf, None
    best_p, by_p = -1.0, None
    for combo in itertools.product(*(problem.domains[v] for v in ids)):
        assignment = dict(zip(ids, combo))
        if not is_solution(problem, assignment):
            continue
        c = sum(problem.unary_cost(v, t) for v, t in assignment.items())
        p = math.prod(
            math.exp(-problem.unary_cost(v, t)) for v, t in assignment.items()
        )
        if c < best_cost:
            best_cost, by_cost = c, assignment
        if p > best_p:
            best_p, by_p = p, assignment
    assert by_cost is not None
    assert by_cost == by_p


def test_solving_compiled_square_reproduces_key():
    puzzle, dictionary, db, cfg = square3()
    compiled = compile_puzzle(puzzle, dictionary, db, cfg)
    res = solve_bnb(compiled.problem)
    assert res.assignment == compiled.key_assignment()
    assert compiled.render(res.assignment).splitlines() == ["CAT", "ARE", "TEN"]


def test_fallback_supplies_pattern_forced_string():
    puzzle, dictionary, db, cfg = square3()
    compiled = compile_puzzle(puzzle, dictionary, db, cfg)
    problem = compiled.problem
    by_label = {s.label: s.id for s in puzzle.slots}
    # Pin the three down slots to words whose rows spell non-dictionary
    # strings; the middle and bottom rows become pattern-forced.
    bindings = {by_label["1D"]: "COT", by_label["2D"]: "AGE", by_label["3D"]: "TOT"}
    live = initial_live(problem)
    for v in (by_label["1D"], by_label["2D"], by_label["3D"]):
        result = forward_check(problem, bindings, v, live)
        live = result.reduced
    assert live[by_label["4A"]] == ("OGO",)
    assert live[by_label["5A"]] == ("TET",)
    assert problem.unary_cost(by_label["5A"], "TET") == cfg.floor_cost


def test_unary_default_is_floor_cost():
    puzzle, dictionary, db, cfg = square3()
    compiled = compile_puzzle(puzzle, dictionary, db, cfg)
    for uc in compiled.problem.soft.values():
        assert uc.default == pytest.approx(-math.log(cfg.floor_epsilon))


def test_partial_cost_is_lower_bound_with_implicit_domains():
    # The unbound minimum admits the default cost, so a completion through a
    # fallback string can never undercut the partial bound.
    puzzle, dictionary, db, cfg = square3()
    compiled = compile_puzzle(puzzle, dictionary, db, cfg)
    problem = compiled.problem
    assert cost(problem, {}) <= 6 * cfg.floor_cost
