"""Run reports: JSON serialization, text tables, and trace figures."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence


@dataclass(frozen=True)
class RunReport:
    """Everything a solve produced, in a round-trippable form.

    `stats` is the solver's wire-format stats object (already a plain dict);
    `solution` is either a name->value binding map or rendered grid text.
    """

    command: str
    solution: dict[str, str] | str | None
    cost: float | None
    stats: dict | None = None
    stopped_by: str = ""
    acpt_points: int | None = None
    words_correct: int | None = None
    letters_correct: int | None = None
    first_mistake_depth: int | None = None

    def to_json(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_json(data: Mapping) -> "RunReport":
        return RunReport(
            command=data["command"],
            solution=data.get("solution"),
            cost=data.get("cost"),
            stats=data.get("stats"),
            stopped_by=data.get("stopped_by", ""),
            acpt_points=data.get("acpt_points"),
            words_correct=data.get("words_correct"),
            letters_correct=data.get("letters_correct"),
            first_mistake_depth=data.get("first_mistake_depth"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def render_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Aligned plain-text table."""
    cells = [[str(h) for h in headers]] + [[str(x) for x in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_tsv(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    out = ["\t".join(str(h) for h in headers)]
    out.extend("\t".join(str(x) for x in row) for row in rows)
    return "\n".join(out) + "\n"


def save_trace_figure(
    traces: Sequence[tuple[str, Sequence[tuple[int, float]]]],
    path: str,
    title: str = "",
) -> None:
    """Plot incumbent cost against nodes expanded for one or more runs."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, trace in traces:
        if not trace:
            continue
        xs = [n for n, _ in trace]
        ys = [c for _, c in trace]
        # Extend the last incumbent to the right edge for a readable staircase.
        ax.step(xs + [max(xs)], ys + [ys[-1]], where="post", label=label)
        ax.plot(xs, ys, "o", markersize=3, color=ax.lines[-1].get_color())
    ax.set_xlabel("nodes expanded")
    ax.set_ylabel("incumbent cost")
    if title:
        ax.set_title(title)
    if any(trace for _, trace in traces):
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
