"""CSV and SVG renderings of pairwise and deviation matrices.

CSV layout: a header row with an empty corner cell followed by the labels in
display order, then one row per alternative (label first).  Probability and
deviation matrices only fill the strict upper triangle, since the lower
triangle is implied by complement/antisymmetry; other cells are empty.
Numbers use 6-decimal fixed point, UTF-8, ``\\n`` line endings.

SVG colours are fixed so files are comparable between runs:

* probabilities: linear ramp from ``#f7fbff`` (0) to ``#08306b`` (1);
* deviations: ``#2166ac`` (-0.25 or less) through ``#f7f7f7`` (0) to
  ``#b2182b`` (+0.25 or more).

Rows run top to bottom and columns left to right in display order, with
the first alternative at the top left.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .core import PairwiseMatrix, as_ranking
from .errors import DimensionError, ParseError

PROB_LOW, PROB_HIGH = "#f7fbff", "#08306b"
DEV_NEG, DEV_MID, DEV_POS = "#2166ac", "#f7f7f7", "#b2182b"
DEV_LIMIT = 0.25
CELL = 56
MARGIN = 110


def _hex(c: str) -> np.ndarray:
    return np.array([int(c[i:i + 2], 16) for i in (1, 3, 5)], dtype=float)


def _mix(c0: str, c1: str, t: float) -> str:
    rgb = np.rint(_hex(c0) + (_hex(c1) - _hex(c0)) * float(np.clip(t, 0.0, 1.0)))
    return "#" + "".join(f"{int(v):02x}" for v in rgb)


def cell_colour(value: float, kind: str) -> str:
    if kind == "deviation":
        t = float(np.clip(value / DEV_LIMIT, -1.0, 1.0))
        return _mix(DEV_MID, DEV_POS, t) if t >= 0 else _mix(DEV_MID, DEV_NEG, -t)
    return _mix(PROB_LOW, PROB_HIGH, value)


def _infer_kind(mat: np.ndarray) -> str:
    if np.allclose(mat + mat.T, 0.0, atol=1e-9):
        return "deviation"
    if np.allclose(mat + mat.T, 1.0, atol=1e-9) or np.all((mat >= 0) & (mat <= 1)):
        return "probability"
    return "full"


def _cells(m: int, kind: str):
    for i in range(m):
        for j in range(m):
            if kind == "full" or j > i:
                yield i, j


def heatmap_csv(mat, ordering: Sequence[int], labels: Sequence[str],
                kind: str | None = None) -> str:
    grid, kind = _prepare(mat, ordering, kind)
    names = [str(labels[j]) for j in ordering]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + names)
    shown = set(_cells(len(names), kind))
    for i, name in enumerate(names):
        writer.writerow([name] + [f"{grid[i, j]:.6f}" if (i, j) in shown else ""
                                  for j in range(len(names))])
    return buf.getvalue()


def heatmap_svg(mat, ordering: Sequence[int], labels: Sequence[str],
                kind: str | None = None, title: str = "") -> str:
    grid, kind = _prepare(mat, ordering, kind)
    names = [escape(str(labels[j])) for j in ordering]
    m = len(names)
    size = MARGIN + CELL * m + 10
    top = MARGIN + (20 if title else 0)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" '
        f'height="{size + (20 if title else 0)}" font-family="sans-serif" font-size="11">',
    ]
    if title:
        out.append(f'<text x="{size / 2:.0f}" y="16" text-anchor="middle">{escape(title)}</text>')
    for k, name in enumerate(names):
        y = top + CELL * k + CELL / 2 + 4
        out.append(f'<text x="{MARGIN - 6}" y="{y:.0f}" text-anchor="end">{name}</text>')
        x = MARGIN + CELL * k + CELL / 2
        out.append(f'<text x="{x:.0f}" y="{top - 6}" text-anchor="start" '
                   f'transform="rotate(-45 {x:.0f} {top - 6})">{name}</text>')
    for i, j in _cells(m, kind):
        v = float(grid[i, j])
        colour = cell_colour(v, kind)
        x, y = MARGIN + CELL * j, top + CELL * i
        ink = "#ffffff" if kind == "probability" and v > 0.6 else "#000000"
        out.append(f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                   f'fill="{colour}" stroke="#ffffff"/>')
        out.append(f'<text x="{x + CELL / 2:.0f}" y="{y + CELL / 2 + 4:.0f}" '
                   f'text-anchor="middle" fill="{ink}">{v:.3f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _prepare(mat, ordering, kind):
    arr = mat.p if isinstance(mat, PairwiseMatrix) else np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    idx = list(as_ranking(ordering, arr.shape[0]))
    if kind is None:
        kind = "probability" if isinstance(mat, PairwiseMatrix) else _infer_kind(arr)
    if kind not in ("probability", "deviation", "full"):
        raise ValueError(f"unknown heatmap kind {kind!r}")
    return arr[np.ix_(idx, idx)], kind


def heatmap_emit(mat, ordering: Sequence[int], labels: Sequence[str], path,
                 format: str = "csv", kind: str | None = None, title: str = "") -> Path:
    """Write ``mat`` reordered by ``ordering`` to ``path`` as CSV or SVG.

    ``kind`` is ``"probability"``, ``"deviation"`` or ``"full"``; it is
    inferred from the matrix when omitted.
    """
    if format == "csv":
        text = heatmap_csv(mat, ordering, labels, kind)
    elif format == "svg":
        text = heatmap_svg(mat, ordering, labels, kind, title)
    else:
        raise ValueError(f"unknown heatmap format {format!r}")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def read_heatmap_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse a heatmap CSV back into labels and a matrix (NaN where blank)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty heatmap file", 1)
    labels = rows[0][1:]
    m = len(labels)
    grid = np.full((m, m), np.nan)
    for i, row in enumerate(rows[1:]):
        if len(row) != m + 1:
            raise ParseError(f"expected {m + 1} fields, got {len(row)}", i + 2)
        for j, cell in enumerate(row[1:]):
            if cell:
                grid[i, j] = float(cell)
    return labels, grid
