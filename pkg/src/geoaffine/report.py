"""Deterministic JSON, CSV and SVG output."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

SCHEMA = "geoaffine/1"
SIG_DIGITS = 12


def _num(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def normalize(obj):
    """Recursively round floats to 12 significant digits and make everything JSON-safe."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [normalize(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(kind: str, payload: dict) -> str:
    doc = {"schema": SCHEMA, "kind": kind, **normalize(payload)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def fmt(x) -> str:
    """One CSV/console cell: 12 significant digits, coordinates joined by spaces."""
    if x is None:
        return ""
    if isinstance(x, (list, tuple, np.ndarray)):
        return " ".join(fmt(v) for v in x)
    if isinstance(x, enum.Enum):
        return str(x.value)
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        v = _num(float(x))
        return v if isinstance(v, str) else f"{float(x):.{SIG_DIGITS}g}"
    return str(x)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


SCAN_COLUMNS = ("c", "verdict", "witness_p", "witness_q", "t", "f0_at_witness", "n_pairs", "seed")


def scan_rows(reports) -> list:
    rows = []
    for r in reports:
        w = r.witness
        rows.append(
            (
                r.c,
                r.verdict,
                None if w is None else w.p.coords,
                None if w is None else w.q.coords,
                None if w is None else w.t,
                None if w is None else w.value,
                r.n_pairs,
                r.seed,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# SVG


class SvgCanvas:
    """Maps a chart window onto a fixed pixel box and collects elements."""

    def __init__(self, window, width: int = 640, height: int = 480, margin: int = 40):
        self.x0, self.x1, self.y0, self.y1 = (float(v) for v in window)
        self.w, self.h, self.m = width, height, margin
        self.items: list[str] = []

    def px(self, x, y):
        sx = self.m + (x - self.x0) / (self.x1 - self.x0) * (self.w - 2 * self.m)
        sy = self.h - self.m - (y - self.y0) / (self.y1 - self.y0) * (self.h - 2 * self.m)
        return sx, sy

    def polyline(self, pts, stroke: str, width: float = 1.5, dash: str | None = None):
        pts = np.asarray(pts, dtype=float)
        pts = pts[np.all(np.isfinite(pts), axis=1)]
        if len(pts) < 2:
            return
        coords = " ".join("{:.2f},{:.2f}".format(*self.px(x, y)) for x, y in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}"{extra}/>')

    def dot(self, x, y, fill: str, label: str | None = None):
        sx, sy = self.px(x, y)
        self.items.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="3.5" fill="{fill}"/>')
        if label:
            self.text(x, y, label, dx=6, dy=-6)

    def text(self, x, y, s: str, dx: float = 0, dy: float = 0, size: int = 12):
        sx, sy = self.px(x, y)
        s = s.replace("&", "&amp;").replace("<", "&lt;")
        self.items.append(f'<text x="{sx + dx:.2f}" y="{sy + dy:.2f}" font-family="sans-serif" font-size="{size}">{s}</text>')

    def frame(self, xlabel: str, ylabel: str):
        (ax, ay), (bx, by) = self.px(self.x0, self.y0), self.px(self.x1, self.y1)
        self.items.insert(0, f'<rect x="{ax:.2f}" y="{by:.2f}" width="{bx - ax:.2f}" height="{ay - by:.2f}" fill="none" stroke="#888"/>')
        self.items.append(f'<text x="{(ax + bx) / 2:.2f}" y="{self.h - 8}" font-family="sans-serif" font-size="12">{xlabel}</text>')
        self.items.append(f'<text x="8" y="{(ay + by) / 2:.2f}" font-family="sans-serif" font-size="12">{ylabel}</text>')

    def render(self, title: str) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" '
            f'viewBox="0 0 {self.w} {self.h}">\n<title>{title}</title>\n'
        )
        return head + "\n".join(self.items) + "\n</svg>\n"
