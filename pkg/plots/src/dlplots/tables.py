"""Markdown (or PNG) rendering of the study's squared-error table CSV.

Input contract: columns {n, sparsity, A, a, kernel, estimator, avg_sq_err,
mc_se, R}.  The layout mirrors the published tables: column groups keyed by
(n, sparsity%, A), one row per (a, kernel).  Cell values are reproduced
verbatim from the CSV text, so nothing rendered can disagree with the data
under a round-trip parse.
"""

from __future__ import annotations

import csv
import warnings
from pathlib import Path

_HEADER = ["n", "sparsity", "A", "a", "kernel", "estimator", "avg_sq_err",
           "mc_se", "R"]


class TableCsvError(ValueError):
    """Malformed study CSV; the message names the offending file and line."""


def read_simtable_csv(path: Path) -> list[dict[str, str]]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _HEADER:
            raise TableCsvError(f"{path}:1: expected header {','.join(_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_HEADER):
                raise TableCsvError(
                    f"{path}:{lineno}: expected {len(_HEADER)} columns, got {len(row)}")
            rows.append(dict(zip(_HEADER, row)))
    if not rows:
        raise TableCsvError(f"{path}: no data rows")
    return rows


def _column_key(row: dict[str, str]) -> tuple[float, float, float]:
    try:
        return float(row["n"]), float(row["sparsity"]), float(row["A"])
    except ValueError as exc:
        raise TableCsvError(f"bad numeric cell in {row}: {exc}") from None


def format_markdown(rows: list[dict[str, str]]) -> str:
    """One markdown table per estimator, column groups (n, q/n%, A)."""
    columns = sorted({_column_key(r) for r in rows})
    row_keys: list[tuple[str, str]] = []
    estimators: list[str] = []
    for r in rows:
        if (r["a"], r["kernel"]) not in row_keys:
            row_keys.append((r["a"], r["kernel"]))
        if r["estimator"] not in estimators:
            estimators.append(r["estimator"])
    by_key = {(_column_key(r), r["a"], r["kernel"], r["estimator"]): r for r in rows}

    def header_label(col: tuple[float, float, float]) -> str:
        n, sparsity, signal = col
        return f"n={n:g}, q/n={100 * sparsity:g}%, A={signal:g}"

    blocks = []
    for est in estimators:
        lines = [f"**Average squared error, posterior {est}**", ""]
        lines.append("| prior / kernel | " +
                     " | ".join(header_label(c) for c in columns) + " |")
        lines.append("|" + "---|" * (len(columns) + 1))
        for a_label, kernel in row_keys:
            cells = []
            for col in columns:
                r = by_key.get((col, a_label, kernel, est))
                if r is None:
                    warnings.warn(
                        f"missing cell for {header_label(col)}, a={a_label}, "
                        f"kernel={kernel}, estimator={est}; rendered blank",
                        RuntimeWarning, stacklevel=2)
                    cells.append("")
                elif r["avg_sq_err"] == "nan":
                    cells.append("FAILED")
                else:
                    cells.append(r["avg_sq_err"])  # verbatim CSV text
            lines.append(f"| DL[{a_label}] {kernel} | " + " | ".join(cells) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def render_table(input_path, output_path) -> Path:
    """Render the study CSV as markdown (.md/.txt) or a PNG image (.png)."""
    input_path = Path(input_path)
    output_path = Path(output_path)
    rows = read_simtable_csv(input_path)
    text = format_markdown(rows)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    if output_path.suffix.lower() == ".png":
        _render_png(text, output_path)
    else:
        with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return output_path


def _render_png(markdown: str, output_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    lines = [ln for ln in markdown.splitlines()]
    fig_height = 0.28 * max(len(lines), 4) + 0.5
    fig, ax = plt.subplots(figsize=(12, fig_height))
    ax.axis("off")
    ax.text(0.01, 0.99, "\n".join(lines), family="monospace", fontsize=8,
            va="top", ha="left")
    fig.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
