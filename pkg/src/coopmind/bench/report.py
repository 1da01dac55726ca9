"""Accuracy report rendering: CSV plus a readable table."""

from __future__ import annotations

import csv
import io

from .accuracy import AccuracyRow


def _columns(rows: list[AccuracyRow]) -> list[str]:
    l = max(len(r.per_position) for r in rows)
    return (
        ["predictor", "target_style", "layout", "split", "samples", "positions", "accuracy_pct"]
        + [f"pos{i + 1}_pct" for i in range(l)]
    )


def _row_values(row: AccuracyRow, columns: list[str]) -> dict:
    values = {
        "predictor": row.predictor,
        "target_style": row.target_style,
        "layout": row.layout,
        "split": row.split,
        "samples": row.samples,
        "positions": row.positions,
        "accuracy_pct": f"{row.accuracy * 100:.2f}",
    }
    for i, acc in enumerate(row.per_position):
        values[f"pos{i + 1}_pct"] = f"{acc * 100:.2f}"
    for column in columns:
        values.setdefault(column, "")
    return values


def render_csv(rows: list[AccuracyRow]) -> str:
    if not rows:
        raise ValueError("no rows to render")
    columns = _columns(rows)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=columns)
    writer.writeheader()
    for row in rows:
        writer.writerow(_row_values(row, columns))
    return out.getvalue()


def render_table(rows: list[AccuracyRow]) -> str:
    if not rows:
        raise ValueError("no rows to render")
    columns = _columns(rows)
    grid = [columns] + [
        [str(_row_values(row, columns)[c]) for c in columns] for row in rows
    ]
    widths = [max(len(line[i]) for line in grid) for i in range(len(columns))]
    lines = []
    for k, line in enumerate(grid):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_report(path, rows: list[AccuracyRow]) -> None:
    with open(path, "w") as f:
        f.write(render_csv(rows))
