"""JSON text format for generic SWCSP instances.

Layout::

    {"variables":   [{"name": str, "domain": [str, ...]}, ...],
     "unary_costs": [{"var": name, "costs": {value: number}, "default": number}, ...],
     "constraints": [{"scope": [name, ...], "allowed": [[str, ...], ...]}, ...]}

Unknown keys are rejected and all costs must be non-negative.
"""

from __future__ import annotations

import json
from typing import Any

from .model import HardConstraint, Swcsp, UnaryCost, Variable


class FormatError(ValueError):
    """Malformed SWCSP file."""


def _check_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise FormatError(f"unknown keys {sorted(extra)} in {where}")
    missing = required - set(obj)
    if missing:
        raise FormatError(f"missing keys {sorted(missing)} in {where}")


def loads(text: str) -> Swcsp:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("top level must be an object")
    _check_keys(data, {"variables", "unary_costs", "constraints"}, {"variables"}, "top level")

    variables: list[Variable] = []
    domains: dict[int, tuple[str, ...]] = {}
    ids: dict[str, int] = {}
    for i, entry in enumerate(data["variables"]):
        _check_keys(entry, {"name", "domain"}, {"name", "domain"}, f"variables[{i}]")
        name = entry["name"]
        if name in ids:
            raise FormatError(f"duplicate variable name {name!r}")
        ids[name] = i
        variables.append(Variable(i, name))
        domains[i] = tuple(str(t) for t in entry["domain"])

    soft: dict[int, UnaryCost] = {}
    for i, entry in enumerate(data.get("unary_costs", [])):
        _check_keys(entry, {"var", "costs", "default"}, {"var", "costs", "default"}, f"unary_costs[{i}]")
        if entry["var"] not in ids:
            raise FormatError(f"unary cost for unknown variable {entry['var']!r}")
        vid = ids[entry["var"]]
        if vid in soft:
            raise FormatError(f"multiple unary costs for variable {entry['var']!r}")
        table = {}
        for tok, c in entry["costs"].items():
            if not isinstance(c, (int, float)) or c < 0:
                raise FormatError(f"cost for {tok!r} must be a non-negative number")
            table[str(tok)] = float(c)
        default = entry["default"]
        if not isinstance(default, (int, float)) or default < 0:
            raise FormatError("default cost must be a non-negative number")
        soft[vid] = UnaryCost(vid, table, float(default))

    hard: list[HardConstraint] = []
    for i, entry in enumerate(data.get("constraints", [])):
        _check_keys(entry, {"scope", "allowed"}, {"scope", "allowed"}, f"constraints[{i}]")
        try:
            scope = tuple(ids[n] for n in entry["scope"])
        except KeyError as exc:
            raise FormatError(f"constraint scope names unknown variable {exc.args[0]!r}") from exc
        allowed = frozenset(tuple(str(t) for t in row) for row in entry["allowed"])
        hard.append(HardConstraint(scope, allowed))

    try:
        return Swcsp(tuple(variables), domains, tuple(hard), soft)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def load(path: str) -> Swcsp:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(problem: Swcsp, indent: int | None = 2) -> str:
    """Serialize an extensional problem back to the JSON format."""
    names = {v.id: v.name for v in problem.variables}
    out: dict[str, Any] = {
        "variables": [
            {"name": v.name, "domain": list(problem.domains[v.id])}
            for v in problem.variables
        ]
    }
    if problem.soft:
        out["unary_costs"] = [
            {
                "var": names[vid],
                "costs": {tok: c for tok, c in sorted(uc.table.items())},
                "default": uc.default,
            }
            for vid, uc in sorted(problem.soft.items())
        ]
    if problem.hard:
        rows = []
        for c in problem.hard:
            if not isinstance(c, HardConstraint):
                raise FormatError("only extensional constraints can be serialized")
            rows.append(
                {
                    "scope": [names[v] for v in c.scope],
                    "allowed": sorted(list(t) for t in c.allowed),
                }
            )
        out["constraints"] = rows
    return json.dumps(out, indent=indent)


def dump(problem: Swcsp, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(problem))
        fh.write("\n")
