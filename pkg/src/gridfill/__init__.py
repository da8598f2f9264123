"""gridfill: a singly weighted CSP solver with a crossword front end."""

from .model import (
    Bindings,
    HardConstraint,
    ProblemError,
    Swcsp,
    UnaryCost,
    Variable,
    build_problem,
    canonical_form,
    cost,
    is_solution,
    restrict,
    restrict_all,
    split,
)
from .propagate import PropagationResult, ac3, forward_check, initial_live
from .heuristics import (
    FailedState,
    ValueScore,
    VariableGap,
    damage,
    min2,
    order_values,
    select_variable,
    state_bound,
)
from .search import (
    ALGORITHMS,
    ConfigError,
    SearchConfig,
    SearchResult,
    SearchStats,
    postprocess,
    run,
    solve_andor,
    solve_backtrack,
    solve_bnb,
    solve_lds,
    solve_lds_post,
)

__version__ = "0.1.0"
