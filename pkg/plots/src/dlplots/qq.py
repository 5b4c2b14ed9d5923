"""QQ panel grids from the harness's quantile CSVs.

Input contract (one file per kernel run): columns {function, prob, q_mcs,
q_scs}, rows grouped by function with prob strictly increasing inside each
group.  Each function becomes one panel of paired quantiles with a
reference diagonal and an annotation of the largest |q_mcs - q_scs| gap;
multiple input files stack as rows of the grid (the three-kernel layout).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_HEADER = ["function", "prob", "q_mcs", "q_scs"]
_PANELS_PER_ROW = 3  # default grid: rows of three panels


class QqCsvError(ValueError):
    """Malformed QQ CSV; the message names the offending file and line."""


@dataclass(frozen=True)
class QqPanels:
    """What render_qq drew: grid shape and the per-panel annotated gaps."""

    image: Path
    data: Path
    rows: int
    cols: int
    max_gaps: dict[tuple[str, str], float]  # (source label, function) -> gap


def read_qq_csv(path: Path) -> dict[str, np.ndarray]:
    """Parse one QQ CSV into {function: (k, 3) array of (prob, q_mcs, q_scs)}."""
    groups: dict[str, list[tuple[float, float, float]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _HEADER:
            raise QqCsvError(f"{path}:1: expected header {','.join(_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise QqCsvError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            name = row[0]
            try:
                prob, qm, qs = float(row[1]), float(row[2]), float(row[3])
            except ValueError as exc:
                raise QqCsvError(f"{path}:{lineno}: {exc}") from None
            if not 0.0 < prob < 1.0:
                raise QqCsvError(f"{path}:{lineno}: prob must be in (0, 1), got {row[1]}")
            group = groups.setdefault(name, [])
            if group and prob <= group[-1][0]:
                raise QqCsvError(
                    f"{path}:{lineno}: prob must be strictly increasing within "
                    f"function {name!r}")
            group.append((prob, qm, qs))
    if not groups:
        raise QqCsvError(f"{path}: no data rows")
    return {name: np.asarray(rows) for name, rows in groups.items()}


def _parse_layout(layout: str | None, panels: int,
                  n_sources: int) -> tuple[int, int]:
    if layout is not None:
        try:
            rows, cols = (int(v) for v in layout.lower().split("x"))
        except ValueError:
            raise QqCsvError(f"layout must look like '2x3', got {layout!r}") from None
        if rows * cols < panels:
            raise QqCsvError(f"layout {layout!r} holds {rows * cols} panels, "
                             f"need {panels}")
        return rows, cols
    if n_sources > 1:
        # one row per input file (the three-kernel batch layout)
        return n_sources, -(-panels // n_sources)
    return -(-panels // _PANELS_PER_ROW), min(panels, _PANELS_PER_ROW)


def render_qq(inputs, output, layout: str | None = None) -> QqPanels:
    """Render QQ panels for one or more harness CSVs into a PNG.

    inputs is a path or a list of paths; with several inputs the grid gets
    one row per file.  Writes the figure at 150 dpi plus the tidy point data
    to <output stem>_data.csv so the figure can be regenerated.  Returns the
    grid shape and each panel's annotated max |q_mcs - q_scs|.
    """
    paths = [Path(p) for p in (inputs if isinstance(inputs, (list, tuple)) else [inputs])]
    output = Path(output)
    sources = [(p.stem, read_qq_csv(p)) for p in paths]
    panels = [(label, name, pts)
              for label, groups in sources
              for name, pts in groups.items()]
    rows, cols = _parse_layout(layout, len(panels), len(sources))

    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 3.2 * rows),
                             squeeze=False)
    max_gaps: dict[tuple[str, str], float] = {}
    for k, (label, name, pts) in enumerate(panels):
        ax = axes[k // cols][k % cols]
        qm, qs = pts[:, 1], pts[:, 2]
        gap = float(np.max(np.abs(qm - qs)))
        max_gaps[(label, name)] = gap
        lo = min(qm.min(), qs.min())
        hi = max(qm.max(), qs.max())
        ax.plot([lo, hi], [lo, hi], lw=0.8, color="0.6", zorder=1)
        ax.plot(qm, qs, ".", ms=3, zorder=2)
        title = name if len(sources) == 1 else f"{label}: {name}"
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("mcs quantile", fontsize=8)
        ax.set_ylabel("scs quantile", fontsize=8)
        ax.tick_params(labelsize=7)
        ax.annotate(f"max gap {gap:.3g}", xy=(0.04, 0.92),
                    xycoords="axes fraction", fontsize=7)
    for k in range(len(panels), rows * cols):
        axes[k // cols][k % cols].axis("off")
    fig.tight_layout()
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=150)
    plt.close(fig)

    data_path = output.with_name(output.stem + "_data.csv")
    with open(data_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("source,function,prob,q_mcs,q_scs\n")
        for label, name, pts in panels:
            for prob, qm, qs in pts:
                fh.write(f"{label},{name},{prob!r},{qm!r},{qs!r}\n")
    return QqPanels(image=output, data=data_path, rows=rows, cols=cols,
                    max_gaps=max_gaps)
