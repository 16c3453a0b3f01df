"""Seeded sampling in geodesic balls (uniform in the exp-chart)."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .manifold import Point, SpaceSpec, tangent_basis

#: default seed used wherever a run must be reproducible
DEFAULT_SEED = 20240001


def default_radius(space: SpaceSpec) -> float:
    """Sampling radius: 0.95 * D/2 on spheres, 3/sqrt|kappa| otherwise (3 when flat)."""
    if space.kappa > 0:
        return 0.95 * space.diameter_bound / 2.0
    if space.kappa < 0:
        return 3.0 / math.sqrt(-space.kappa)
    return 3.0


def basis_matrix(space: SpaceSpec, x: Point) -> np.ndarray:
    return np.array([e.comps for e in tangent_basis(space, x)])


def ball_tangents(space: SpaceSpec, x: Point, radius: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` tangent vectors at ``x`` uniform in the ball of the given radius."""
    E = basis_matrix(space, x)
    d = space.dim
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / d)
    return (g * r[:, None]) @ E


def ball_points(space: SpaceSpec, center: Point, radius: float, n: int, rng: np.random.Generator) -> np.ndarray:
    V = ball_tangents(space, center, radius, n, rng)
    return space.kernel.exp(center.coords, V)


def ball_sampler(space: SpaceSpec, center: Point, radius: float | None = None) -> Callable[[np.random.Generator], Point]:
    """A sampler ``rng -> Point`` drawing uniformly from the exp-chart ball at ``center``."""
    radius = default_radius(space) if radius is None else radius

    def draw(rng: np.random.Generator) -> Point:
        return Point(space, ball_points(space, center, radius, 1, rng)[0])

    return draw
