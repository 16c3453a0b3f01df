"""Grid samples of f0 over a 2-D chart window, and a static SVG of one level."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import contourpy
import numpy as np

from .affine import AffineProbe, f0_batch
from .convexity import (
    construction_applies,
    example_chord,
    necessity_construction,
    sublevel_membership,
)
from .errors import UnsupportedDimension
from .manifold import Kind, SpaceSpec
from .report import SvgCanvas, fmt


class Chart:
    """Plane coordinates ``(t1, t2)`` for a 2-D space.

    Half-plane and Euclidean use their own coordinates; the sphere uses
    stereographic projection from the pole opposite the origin; the
    hyperboloid uses the Poincare disk.  Both non-trivial charts send
    `SpaceSpec.origin` to ``(0, 0)``.
    """

    def __init__(self, space: SpaceSpec):
        if space.dim != 2:
            raise UnsupportedDimension(f"level-set plots need a 2-D space, got dim {space.dim}")
        self.space = space

    def default_window(self) -> tuple:
        if self.space.kind is Kind.HALFPLANE:
            return (-1.5, 1.5, 0.02, 2.0)
        return (-1.5, 1.5, -1.5, 1.5)

    def to_space(self, uv: np.ndarray) -> np.ndarray:
        """Chart coordinates to point coordinates; NaN rows where the chart is undefined."""
        uv = np.asarray(uv, dtype=float)
        kind = self.space.kind
        if kind in (Kind.HALFPLANE, Kind.EUCLIDEAN):
            out = uv.copy()
            if kind is Kind.HALFPLANE:
                out[uv[..., 1] <= 0] = np.nan
            return out
        R = self.space.radius
        s = np.sum(uv * uv, axis=-1, keepdims=True)
        if kind is Kind.SPHERE:
            return R * np.concatenate([2 * uv, 1 - s], axis=-1) / (1 + s)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = R * np.concatenate([2 * uv, 1 + s], axis=-1) / (1 - s)
        out[s[..., 0] >= 1] = np.nan
        return out

    def from_space(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        kind = self.space.kind
        if kind in (Kind.HALFPLANE, Kind.EUCLIDEAN):
            return x.copy()
        R = self.space.radius
        return (x[..., :2] / R) / (1 + x[..., 2:3] / R)


@dataclass
class LevelGrid:
    probe: AffineProbe
    c: float
    window: tuple
    t1: np.ndarray
    t2: np.ndarray
    f0: np.ndarray

    def csv_rows(self):
        T1, T2 = np.meshgrid(self.t1, self.t2)
        for a, b, v in zip(T1.ravel(), T2.ravel(), self.f0.ravel()):
            yield a, b, v

    def contour(self) -> list:
        # +inf (outside the cap on a sphere) is a real value of f0, so the
        # sub-level boundary closes along the cap edge rather than stopping there
        z = np.where(np.isposinf(self.f0), abs(self.c) + 1e12, self.f0)
        z = np.ma.masked_invalid(z)
        gen = contourpy.contour_generator(self.t1, self.t2, z)
        return [np.asarray(seg) for seg in gen.lines(self.c)]


def level_grid(probe: AffineProbe, c: float, window: Optional[tuple] = None, resolution: int = 121) -> LevelGrid:
    chart = Chart(probe.space)
    window = chart.default_window() if window is None else tuple(window)
    t1 = np.linspace(window[0], window[1], resolution)
    t2 = np.linspace(window[2], window[3], resolution)
    T1, T2 = np.meshgrid(t1, t2)
    pts = chart.to_space(np.stack([T1, T2], axis=-1))
    ok = np.all(np.isfinite(pts), axis=-1)
    vals = np.full(T1.shape, np.nan)
    vals[ok] = f0_batch(probe, pts[ok])
    return LevelGrid(probe, float(c), window, t1, t2, vals)


def _chord_for(probe: AffineProbe, c: float):
    if probe.is_standard_halfplane:
        p, q = example_chord()
        if sublevel_membership(probe, c, p) and sublevel_membership(probe, c, q):
            return p, q
    if construction_applies(probe, c):
        return necessity_construction(probe, c)
    return None


def levelset_svg(grid: LevelGrid) -> str:
    """The level curve, the axis geodesic through x0 along u0, and a witness chord when one exists."""
    probe, space = grid.probe, grid.probe.space
    chart = Chart(space)
    k = space.kernel
    cv = SvgCanvas(grid.window)
    for seg in grid.contour():
        cv.polyline(seg, "#1f5fbf", 2.0)

    span = 0.999 * space.diameter_bound / 2 if space.kappa > 0 else 6.0
    s = np.linspace(-span, span, 801)
    unit = probe.u0.comps / probe.u0_norm
    axis = chart.from_space(k.exp(probe.x0.coords, s[:, None] * unit))
    cv.polyline(axis, "#444", 1.0, dash="5,4")

    chord = _chord_for(probe, grid.c)
    if chord is not None:
        p, q = chord
        ts = np.linspace(0.0, 1.0, 201)
        pts = k.exp(p.coords, ts[:, None] * k.log(p.coords, q.coords))
        cv.polyline(chart.from_space(pts), "#c0392b", 1.8)
        for name, pt in (("p", p), ("q", q)):
            cv.dot(*chart.from_space(pt.coords), "#c0392b", name)
        mid = chart.from_space(pts[100])
        cv.dot(*mid, "#c0392b", "midpoint")
    cv.dot(*chart.from_space(probe.x0.coords), "#000", "x0")
    cv.frame("t1", "t2")
    cv.text(grid.window[0], grid.window[3], f"f0 = {fmt(grid.c)}", dx=4, dy=-10, size=13)
    return cv.render(f"sub-level boundary of f0 at c = {fmt(grid.c)}")


def contour_crosses_between(grid: LevelGrid, a, b) -> bool:
    """True when f0 - c changes sign between chart points ``a`` and ``b`` (nearest grid nodes)."""

    def at(pt):
        i = int(np.argmin(np.abs(grid.t2 - pt[1])))
        j = int(np.argmin(np.abs(grid.t1 - pt[0])))
        return grid.f0[i, j] - grid.c

    va, vb = at(a), at(b)
    return bool(math.isfinite(va) and math.isfinite(vb) and va * vb < 0)
