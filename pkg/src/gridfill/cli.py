"""Command-line driver.

Subcommands: solve-wcsp (generic SWCSP JSON files), solve-xw (crossword
puzzles end to end), validate (puzzle structure checks), first-mistake
(heuristic dive accuracy), and bench (algorithm comparison with JSON, TSV,
and trace figures).

Exit codes: 0 success, 1 usage or parse error, 2 no solution (or failed
validation), 3 wall-clock budget exhausted with an incumbent (still printed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import jsonio
from .crossword import (
    CompileError,
    LexiconError,
    PuzzleParseError,
    ScorerConfig,
    acpt_score,
    compile_puzzle,
    first_mistake_depth,
    grade_fills,
    load_clue_database_file,
    load_dictionary_file,
    parse_puzzle,
    parse_solution_text,
    validate_puzzle,
)
from .model import ProblemError, Swcsp
from .report import RunReport, render_table, render_tsv, save_trace_figure
from .search import ConfigError, SearchConfig, SearchResult, run

_ALGO_FLAGS = {
    "bt": "backtrack",
    "bnb": "bnb",
    "lds": "lds",
    "lds-post": "lds_post",
    "andor": "andor",
}

_INPUT_ERRORS = (
    jsonio.FormatError,
    PuzzleParseError,
    LexiconError,
    CompileError,
    ConfigError,
    ProblemError,
    OSError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise UsageError(message)


def _add_search_flags(p: argparse.ArgumentParser, default_algo: str) -> None:
    p.add_argument("--algo", choices=sorted(_ALGO_FLAGS), default=default_algo,
                   help=f"search algorithm (default {default_algo})")
    p.add_argument("--max-disc", type=int, default=0, metavar="N",
                   help="discrepancy limit for a single (non-iterative) run")
    p.add_argument("--iterative", action=argparse.BooleanOptionalAction, default=None,
                   help="run limits n = 0, 1, 2, ... carrying the best solution forward")
    p.add_argument("--budget-ms", type=float, default=None, metavar="MS",
                   help="wall-clock budget in milliseconds")
    p.add_argument("--stall-seconds", type=float, default=60.0, metavar="S",
                   help="stop after this long without improvement (default 60)")
    p.add_argument("--stop-on-no-improvement", action=argparse.BooleanOptionalAction,
                   default=None, help="stop after a full iteration with no improvement")
    p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility")


def _config_from(args, *, iterative_default: bool, stop_default: bool,
                 extra_budget_s: float | None = None) -> SearchConfig:
    budget = args.budget_ms / 1000.0 if args.budget_ms is not None else None
    if extra_budget_s is not None:
        budget = extra_budget_s if budget is None else min(budget, extra_budget_s)
    iterative = args.iterative if args.iterative is not None else iterative_default
    stop = (args.stop_on_no_improvement
            if args.stop_on_no_improvement is not None else stop_default)
    return SearchConfig(
        algorithm=_ALGO_FLAGS[args.algo],
        max_discrepancies=args.max_disc,
        iterative=iterative,
        budget_seconds=budget,
        stall_seconds=args.stall_seconds,
        stop_on_no_improvement=stop,
        seed=args.seed,
    )


def _exit_code(result: SearchResult) -> int:
    if result.assignment is None:
        return 2
    if result.stats.stopped_by == "budget":
        return 3
    return 0


def _maybe_plot(args, traces, title: str) -> None:
    if getattr(args, "trace_plot", None):
        save_trace_figure(traces, args.trace_plot, title)


def cmd_solve_wcsp(args) -> int:
    problem = jsonio.load(args.file)
    config = _config_from(args, iterative_default=False, stop_default=False)
    result = run(problem, config)
    names = {v.id: v.name for v in problem.variables}
    solution = (
        {names[v]: tok for v, tok in sorted(result.assignment.items())}
        if result.assignment is not None
        else None
    )
    report = RunReport(
        command="solve-wcsp",
        solution=solution,
        cost=None if result.assignment is None else result.cost,
        stats=result.stats.to_json(),
        stopped_by=result.stats.stopped_by,
    )
    if args.json:
        print(report.dumps())
    else:
        if solution is None:
            print("no solution")
        else:
            for name, tok in solution.items():
                print(f"{name} = {tok}")
            print(f"cost = {result.cost}")
        print(json.dumps(result.stats.to_json()))
    _maybe_plot(args, [(config.algorithm, result.stats.trace)], Path(args.file).stem)
    return _exit_code(result)


def _load_xw_inputs(args):
    with open(args.puzzle, "r", encoding="utf-8") as fh:
        puzzle = parse_puzzle(fh.read())
    dictionary = load_dictionary_file(args.dict)
    db = load_clue_database_file(args.clues)
    config = ScorerConfig.load(args.scorer_config) if args.scorer_config else ScorerConfig()
    return puzzle, dictionary, db, config


def _key_fills(args, puzzle):
    if args.key:
        with open(args.key, "r", encoding="utf-8") as fh:
            letters = parse_solution_text(fh.read(), puzzle.grid)
        return {
            s.id: "".join(letters[c] for c in s.cells) for s in puzzle.slots
        }, letters
    if puzzle.solution is not None:
        return puzzle.key_fills(), dict(puzzle.solution)
    return None, None


def cmd_solve_xw(args) -> int:
    puzzle, dictionary, db, scorer = _load_xw_inputs(args)
    compiled = compile_puzzle(puzzle, dictionary, db, scorer)
    limit_s = args.limit_minutes * 60.0 if args.limit_minutes else None
    config = _config_from(args, iterative_default=True, stop_default=True,
                          extra_budget_s=limit_s)
    t0 = time.monotonic()
    result = run(compiled.problem, config)
    elapsed_s = time.monotonic() - t0

    report_kwargs: dict = {}
    rendered = None
    if result.assignment is not None:
        rendered = compiled.render(result.assignment)
        key, key_letters = _key_fills(args, puzzle)
        if key is not None:
            graded_puzzle = puzzle
            if puzzle.solution is None and key_letters is not None:
                from .crossword.grid import Puzzle as _Puzzle

                graded_puzzle = _Puzzle(puzzle.grid, puzzle.slots, puzzle.clues, key_letters)
            grade = grade_fills(graded_puzzle, result.assignment)
            report_kwargs["words_correct"] = grade.words_correct
            report_kwargs["letters_correct"] = grade.letters_correct
            if args.limit_minutes:
                remaining = max(0, int((args.limit_minutes * 60 - elapsed_s) // 60))
                report_kwargs["acpt_points"] = acpt_score(
                    grade.words_correct, grade.letters_wrong, remaining, grade.perfect
                )
    report = RunReport(
        command="solve-xw",
        solution=rendered,
        cost=None if result.assignment is None else result.cost,
        stats=result.stats.to_json(),
        stopped_by=result.stats.stopped_by,
        **report_kwargs,
    )
    if args.json:
        print(report.dumps())
    else:
        if rendered is None:
            print("no fill found")
        else:
            print(rendered)
            print(f"cost = {result.cost}")
            if report.words_correct is not None:
                print(f"words correct = {report.words_correct}")
                print(f"letters correct = {report.letters_correct}")
            if report.acpt_points is not None:
                print(f"acpt points = {report.acpt_points}")
        print(json.dumps(result.stats.to_json()))
    _maybe_plot(args, [(config.algorithm, result.stats.trace)], Path(args.puzzle).stem)
    return _exit_code(result)


def cmd_validate(args) -> int:
    with open(args.puzzle, "r", encoding="utf-8") as fh:
        puzzle = parse_puzzle(fh.read())
    violations = validate_puzzle(puzzle.grid, puzzle.slots)
    if args.json:
        print(json.dumps([
            {"kind": v.kind, "severity": v.severity, "message": v.message}
            for v in violations
        ], indent=2))
    else:
        if not violations:
            print(f"{args.puzzle}: ok ({len(puzzle.slots)} slots)")
        for v in violations:
            print(f"{v.severity}: {v.kind}: {v.message}")
    return 2 if any(v.severity == "error" for v in violations) else 0


def cmd_first_mistake(args) -> int:
    puzzle, dictionary, db, scorer = _load_xw_inputs(args)
    compiled = compile_puzzle(puzzle, dictionary, db, scorer)
    key, _ = _key_fills(args, puzzle)
    if key is None:
        raise UsageError("first-mistake needs an answer key (--key or SOLUTION section)")
    depth = first_mistake_depth(compiled, key, value_order=args.value_order)
    report = RunReport(
        command="first-mistake",
        solution=None,
        cost=None,
        first_mistake_depth=depth,
    )
    if args.json:
        print(report.dumps())
    else:
        print(f"first mistake after {depth} of {len(puzzle.slots)} words "
              f"({args.value_order} ordering)")
    return 0


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if not algos:
        raise UsageError("bench needs at least one algorithm")
    for a in algos:
        if a not in _ALGO_FLAGS:
            raise UsageError(f"unknown algorithm {a!r} (choose from {sorted(_ALGO_FLAGS)})")

    rows = []
    records = []
    traces: dict[str, list[tuple[str, list[tuple[int, float]]]]] = {}
    for path in args.instances:
        stem = Path(path).stem
        try:
            problem = jsonio.load(path)
        except _INPUT_ERRORS as exc:
            records.append({"instance": stem, "error": str(exc)})
            rows.append([stem, "-", "error", "-", "-", str(exc)])
            continue
        for algo in algos:
            ns = argparse.Namespace(**vars(args))
            ns.algo = algo
            config = _config_from(ns, iterative_default=False, stop_default=False)
            result = run(problem, config)
            stats = result.stats
            records.append({
                "instance": stem,
                "algorithm": config.algorithm,
                "cost": None if result.assignment is None else result.cost,
                "nodes": stats.nodes_expanded,
                "wall_ms": round(stats.wall_ms, 3),
                "n": stats.n,
                "discrepancies_used": stats.discrepancies_used,
                "trace": [[n, c] for n, c in stats.trace],
            })
            rows.append([
                stem,
                config.algorithm,
                "-" if result.assignment is None else f"{result.cost:.6g}",
                stats.nodes_expanded,
                f"{stats.wall_ms:.1f}",
                stats.stopped_by,
            ])
            traces.setdefault(stem, []).append((config.algorithm, list(stats.trace)))

    headers = ["instance", "algorithm", "cost", "nodes", "wall_ms", "note"]
    if args.json:
        print(json.dumps(records, indent=2))
    else:
        print(render_table(headers, rows))

    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.json").write_text(json.dumps(records, indent=2) + "\n")
        tsv_rows = [
            [r.get("instance"), r.get("algorithm", "-"),
             r.get("cost", ""), r.get("nodes", ""), r.get("wall_ms", ""),
             r.get("n", ""), r.get("discrepancies_used", "")]
            for r in records
        ]
        (out / "bench.tsv").write_text(render_tsv(
            ["instance", "algorithm", "cost", "nodes", "wall_ms", "n", "discrepancies_used"],
            tsv_rows,
        ))
        for stem, tr in traces.items():
            save_trace_figure(tr, str(out / f"{stem}.png"), title=stem)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="gridfill", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-wcsp", help="solve a generic SWCSP JSON file")
    p.add_argument("file")
    _add_search_flags(p, "bnb")
    p.add_argument("--json", action="store_true", help="emit a JSON run report")
    p.add_argument("--trace-plot", metavar="PNG", help="write an incumbent-trace figure")
    p.set_defaults(func=cmd_solve_wcsp)

    p = sub.add_parser("solve-xw", help="solve a crossword puzzle end to end")
    p.add_argument("puzzle")
    p.add_argument("--dict", required=True, help="TSV dictionary: WORD<TAB>merit")
    p.add_argument("--clues", required=True, help="TSV clue database: clue<TAB>ANSWER<TAB>count")
    p.add_argument("--scorer-config", help="JSON scorer configuration")
    p.add_argument("--key", help="answer key (SOLUTION-style letter rows)")
    p.add_argument("--limit-minutes", type=int, default=None,
                   help="tournament time limit; also caps the solve budget")
    _add_search_flags(p, "andor")
    p.add_argument("--json", action="store_true", help="emit a JSON run report")
    p.add_argument("--trace-plot", metavar="PNG", help="write an incumbent-trace figure")
    p.set_defaults(func=cmd_solve_xw)

    p = sub.add_parser("validate", help="report structural violations in a puzzle")
    p.add_argument("puzzle")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("first-mistake", help="words filled correctly before the first error")
    p.add_argument("puzzle")
    p.add_argument("--dict", required=True)
    p.add_argument("--clues", required=True)
    p.add_argument("--scorer-config")
    p.add_argument("--key")
    p.add_argument("--value-order", choices=["damage", "local"], default="damage",
                   help="full damage ordering or own-cost-only ordering")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_first_mistake)

    p = sub.add_parser("bench", help="compare algorithms across instances")
    p.add_argument("instances", nargs="+", help="SWCSP JSON files")
    p.add_argument("--algos", required=True,
                   help="comma-separated algorithms, e.g. bnb,lds-post,andor")
    _add_search_flags(p, "bnb")
    p.add_argument("--json", action="store_true", help="print machine-readable records")
    p.add_argument("--out-dir", help="write bench.json, bench.tsv, and trace figures here")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
