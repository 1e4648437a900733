"""CSV and plain-PGM output for sweep results."""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

from .sweep import SweepResult

CSV_HEADER = ("p", "q", "count", "flag")


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_heatmap(result: SweepResult, csv_path=None, pgm_path=None) -> None:
    """Write the sweep as CSV rows and/or a P2 grayscale image.

    The image has one column per ``q`` value and one row per ``p`` value,
    with ``p`` increasing upwards (first image row is the largest ``p``).
    """
    if csv_path is not None:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            write_csv(result, fh)
    if pgm_path is not None:
        Path(pgm_path).write_text(pgm_text(result), encoding="ascii")


def write_csv(result: SweepResult, fh) -> None:
    """CSV rows ``p,q,count,flag``; invalid cells have an empty count."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p, q, c in result.cells():
        w.writerow([_fmt(p), _fmt(q), "" if c is None else c, "invalid" if c is None else ""])


def pgm_text(result: SweepResult) -> str:
    valid = [c for row in result.counts for c in row if c is not None]
    top = max(valid, default=1)
    levels = max(1, top - 1)
    lines = [
        "P2",
        f"# pixel = round(min(count-1, 255) * 255 / {levels}); invalid cells are 0;"
        " columns follow q, rows follow p from high to low",
        f"{len(result.qs)} {len(result.ps)}",
        "255",
    ]
    for row in reversed(result.counts):
        px = []
        for c in row:
            if c is None:
                px.append(0)
            else:
                px.append(min(255, round(min(c - 1, 255) * 255 / levels)))
        lines.append(" ".join(str(v) for v in px))
    return "\n".join(lines) + "\n"


def read_heatmap_csv(csv_path) -> SweepResult:
    """Inverse of the CSV part of :func:`write_heatmap`.

    Axis values are recovered as the exact binary values of the written
    floats, so a grid of floats round-trips exactly.
    """
    with open(csv_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{csv_path}: expected header {','.join(CSV_HEADER)}")
    cells = {}
    ps, qs = [], []
    for lineno, rec in enumerate(rows[1:], start=2):
        if len(rec) != 4:
            raise ValueError(f"{csv_path}:{lineno}: expected 4 fields")
        p, q = float(rec[0]), float(rec[1])
        if p not in ps:
            ps.append(p)
        if q not in qs:
            qs.append(q)
        cells[(p, q)] = None if rec[3] == "invalid" else int(rec[2])
    counts = tuple(tuple(cells[(p, q)] for q in qs) for p in ps)
    return SweepResult(tuple(ps), tuple(qs), counts)


def same_grid(a: SweepResult, b: SweepResult) -> bool:
    """True if both results have equal counts and axes equal as floats."""
    return (
        a.counts == b.counts
        and [float(Fraction(p)) for p in a.ps] == [float(p) for p in b.ps]
        and [float(Fraction(q)) for q in a.qs] == [float(q) for q in b.qs]
    )
