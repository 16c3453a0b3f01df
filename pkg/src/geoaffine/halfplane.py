"""Explicit formulas on the Poincare half-plane.

Everything here works in the natural chart ``(t1, t2)``, ``t2 > 0``, with
metric ``g11 = g22 = 1/t2^2``.  Vector fields are given componentwise,
optionally with analytic partial derivatives; several operations need those
partials and refuse to guess them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import CoincidentPoints, MissingPartials
from .manifold import Kind, Point, SpaceSpec, TangentVec, geodesic

HALFPLANE = SpaceSpec.halfplane()

#: relative tolerance under which two abscissae count as equal
VERTICAL_RTOL = 1e-12
#: default RK4 step count for the transport ODE
RK4_STEPS = 1024

_ARTANH_CLAMP = 1.0 - 1e-15


def artanh(u: float) -> float:
    """Inverse hyperbolic tangent, argument clamped just inside (-1, 1)."""
    u = min(max(u, -_ARTANH_CLAMP), _ARTANH_CLAMP)
    return 0.5 * math.log((1.0 + u) / (1.0 - u))


def _coords(x) -> tuple[float, float]:
    if isinstance(x, Point):
        if x.space.kind is not Kind.HALFPLANE:
            raise ValueError(f"{x!r} is not a half-plane point")
        return float(x.coords[0]), float(x.coords[1])
    t1, t2 = (float(c) for c in x)
    return t1, t2


def _is_vertical(t1: float, s1: float) -> bool:
    return abs(t1 - s1) <= VERTICAL_RTOL * (1.0 + abs(t1) + abs(s1))


@dataclass(frozen=True)
class HalfPlaneGeodesicParams:
    """A complete half-plane geodesic: the line ``t1 = a`` or a semicircle.

    Semicircles are centred at ``(b, 0)`` with radius ``r`` and follow
    ``s -> (b - r tanh s, r / cosh s)``; vertical lines follow ``s -> (a, e^s)``.
    """

    kind: str
    a: float = math.nan
    b: float = math.nan
    r: float = math.nan

    @classmethod
    def vertical(cls, a: float) -> "HalfPlaneGeodesicParams":
        return cls("vertical", a=float(a))

    @classmethod
    def semicircle(cls, b: float, r: float) -> "HalfPlaneGeodesicParams":
        if not r > 0:
            raise ValueError(f"semicircle radius must be positive, got {r}")
        return cls("semicircle", b=float(b), r=float(r))

    @property
    def is_vertical(self) -> bool:
        return self.kind == "vertical"

    def point(self, s: float) -> tuple[float, float]:
        if self.is_vertical:
            return self.a, math.exp(s)
        return self.b - self.r * math.tanh(s), self.r / math.cosh(s)

    def velocity(self, s: float) -> tuple[float, float]:
        if self.is_vertical:
            return 0.0, math.exp(s)
        ch = math.cosh(s)
        return -self.r / ch**2, -self.r * math.sinh(s) / ch**2

    def parameter_of(self, x) -> float:
        """Arc parameter ``s`` at which the curve passes through ``x``."""
        t1, t2 = _coords(x)
        if self.is_vertical:
            return math.log(t2)
        return artanh((self.b - t1) / self.r)


def halfplane_params(x, y) -> HalfPlaneGeodesicParams:
    """Parameters of the complete geodesic through ``x`` and ``y``."""
    t1, t2 = _coords(x)
    s1, s2 = _coords(y)
    if t1 == s1 and t2 == s2:
        raise CoincidentPoints(f"({t1}, {t2}) and ({s1}, {s2}) coincide")
    if _is_vertical(t1, s1):
        return HalfPlaneGeodesicParams.vertical(t1)
    b = (s1**2 + s2**2 - (t1**2 + t2**2)) / (2.0 * (s1 - t1))
    return HalfPlaneGeodesicParams.semicircle(b, math.sqrt((s1 - b) ** 2 + s2**2))


def log_map_closed_form(base, target) -> np.ndarray:
    """Chart components of ``exp_base^{-1}(target)`` from the b/r closed form.

    This is the textbook piecewise formula (vertical branch when the abscissae
    agree, semicircle branch otherwise).  It loses accuracy as the semicircle
    radius grows; `geoaffine.manifold.log_map` uses a rearranged form of the
    same expression that stays accurate near the branch switch.
    """
    s1, s2 = _coords(base)
    t1, t2 = _coords(target)
    if t1 == s1 and t2 == s2:
        return np.zeros(2)
    if _is_vertical(t1, s1):
        return np.array([0.0, s2 * math.log(t2 / s2)])
    p = halfplane_params(target, base)
    amp = s2 / p.r * (artanh((p.b - s1) / p.r) - artanh((p.b - t1) / p.r))
    return amp * np.array([s2, p.b - s1])


def joining_geodesic(x, y, s: float) -> tuple[float, float]:
    """Point at parameter ``s`` in [0, 1] of the geodesic from ``x`` to ``y``."""
    t1, t2 = _coords(x)
    s1, s2 = _coords(y)
    if _is_vertical(t1, s1):
        return t1, math.exp((1.0 - s) * math.log(t2) + s * math.log(s2))
    p = halfplane_params(x, y)
    arg = (1.0 - s) * artanh((p.b - t1) / p.r) + s * artanh((p.b - s1) / p.r)
    return p.b - p.r * math.tanh(arg), p.r / math.cosh(arg)


@dataclass(frozen=True)
class ChristoffelTable:
    """Connection coefficients at a point; ``symbols[k, i, j]`` is Gamma^(k+1)_(i+1)(j+1)."""

    t2: float
    symbols: np.ndarray

    def __call__(self, k: int, i: int, j: int) -> float:
        """1-based access, ``table(2, 1, 1)`` is Gamma^2_11."""
        return float(self.symbols[k - 1, i - 1, j - 1])


def christoffel(x) -> ChristoffelTable:
    _, t2 = _coords(x)
    g = np.zeros((2, 2, 2))
    g[0, 0, 1] = g[0, 1, 0] = g[1, 1, 1] = -1.0 / t2
    g[1, 0, 0] = 1.0 / t2
    g.setflags(write=False)
    return ChristoffelTable(t2, g)


@dataclass(frozen=True)
class VectorField2:
    """A vector field ``(X1, X2)`` on the half-plane.

    ``jacobian(t1, t2)`` returns ``J[k, j] = dX^(k+1)/dt_(j+1)`` when known.
    """

    value: Callable[[float, float], tuple[float, float]]
    jacobian: Optional[Callable[[float, float], np.ndarray]] = None

    @classmethod
    def constant(cls, c1: float, c2: float) -> "VectorField2":
        return cls(lambda t1, t2: (c1, c2), lambda t1, t2: np.zeros((2, 2)))

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.value(*_coords(x)), dtype=float)

    def at(self, x: Point) -> TangentVec:
        return TangentVec(x, self(x))

    def partials(self, x, h: float = 1e-6) -> np.ndarray:
        """Analytic Jacobian if available, else central differences."""
        t1, t2 = _coords(x)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(t1, t2), dtype=float)
        step = h * max(1.0, abs(t1), t2)
        step2 = min(step, 0.5 * t2)
        d1 = (np.asarray(self.value(t1 + step, t2)) - np.asarray(self.value(t1 - step, t2))) / (2 * step)
        d2 = (np.asarray(self.value(t1, t2 + step2)) - np.asarray(self.value(t1, t2 - step2))) / (2 * step2)
        return np.column_stack([d1, d2])

    def analytic_partials(self, x) -> np.ndarray:
        if self.jacobian is None:
            raise MissingPartials("this vector field carries no analytic partial derivatives")
        return np.asarray(self.jacobian(*_coords(x)), dtype=float)


@dataclass(frozen=True)
class ScalarField2:
    """A function on the half-plane with optional analytic first and second partials."""

    value: Callable[[float, float], float]
    partials: Optional[Callable[[float, float], tuple[float, float]]] = None
    hessian: Optional[Callable[[float, float], np.ndarray]] = None

    def __call__(self, x) -> float:
        return float(self.value(*_coords(x)))

    def grad_euclid(self, x, h: float = 1e-6) -> np.ndarray:
        t1, t2 = _coords(x)
        if self.partials is not None:
            return np.asarray(self.partials(t1, t2), dtype=float)
        step = h * max(1.0, abs(t1), t2)
        step2 = min(step, 0.5 * t2)
        return np.array(
            [
                (self.value(t1 + step, t2) - self.value(t1 - step, t2)) / (2 * step),
                (self.value(t1, t2 + step2) - self.value(t1, t2 - step2)) / (2 * step2),
            ]
        )


def connection_apply(X: VectorField2, Y, x) -> TangentVec:
    """``(nabla_Y X)(x)`` from the closed-form connection of the half-plane.

    ``Y`` is a `VectorField2` or a fixed pair of components at ``x``.
    """
    t1, t2 = _coords(x)
    J = X.analytic_partials(x)
    X1, X2 = X(x)
    Y1, Y2 = Y(x) if isinstance(Y, VectorField2) else (float(Y[0]), float(Y[1]))
    out = (
        Y1 * J[0, 0] + Y2 * J[0, 1] - X1 * Y2 / t2 - X2 * Y1 / t2,
        Y1 * J[1, 0] + Y2 * J[1, 1] + X1 * Y1 / t2 - X2 * Y2 / t2,
    )
    return TangentVec(_as_point(x), out)


def _as_point(x) -> Point:
    return x if isinstance(x, Point) else HALFPLANE.point(_coords(x))


def transport_ode_residual(X: VectorField2, params: HalfPlaneGeodesicParams, s: float) -> tuple[float, float]:
    """Left-hand sides of the parallel-transport ODE for ``X`` along ``params`` at ``s``.

    Both entries vanish exactly when ``X`` is parallel along the curve at ``s``.
    """
    g1, g2 = params.point(s)
    d1, d2 = params.velocity(s)
    X1, X2 = X((g1, g2))
    J = X.partials((g1, g2))
    dX1 = J[0, 0] * d1 + J[0, 1] * d2
    dX2 = J[1, 0] * d1 + J[1, 1] * d2
    return (dX1 - X1 / g2 * d2 - X2 / g2 * d1, dX2 + X1 / g2 * d1 - X2 / g2 * d2)


def transport_rk4(x: Point, y: Point, v: TangentVec, steps: int = RK4_STEPS) -> TangentVec:
    """Parallel transport from ``x`` to ``y`` by fixed-step RK4 on the transport ODE.

    Independent of the closed-form transport in `geoaffine.manifold`; only the
    geodesic itself is shared.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    seg = geodesic(HALFPLANE, x, y)
    k = HALFPLANE.kernel
    ts = np.linspace(0.0, 1.0, 2 * steps + 1)
    V = seg.initial_velocity.comps
    pts = k.exp(x.coords, ts[:, None] * V)
    vel = k.velocity(x.coords, V, ts)

    def rhs(i, X):
        g2 = pts[i, 1]
        d1, d2 = vel[i]
        return np.array([(X[0] * d2 + X[1] * d1) / g2, (-X[0] * d1 + X[1] * d2) / g2])

    h = 1.0 / steps
    X = np.array(v.comps, dtype=float)
    for n in range(steps):
        i = 2 * n
        k1 = rhs(i, X)
        k2 = rhs(i + 1, X + 0.5 * h * k1)
        k3 = rhs(i + 1, X + 0.5 * h * k2)
        k4 = rhs(i + 2, X + h * k3)
        X = X + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return TangentVec(seg.end, X)


def gradient_hp(f: ScalarField2, x) -> TangentVec:
    """Riemannian gradient ``t2^2 (df/dt1, df/dt2)``."""
    _, t2 = _coords(x)
    return TangentVec(_as_point(x), t2 * t2 * f.grad_euclid(x))


def gradient_field(f: ScalarField2) -> VectorField2:
    """``grad f`` as a vector field; analytic partials when ``f`` supplies its Hessian."""

    def value(t1, t2):
        return tuple(t2 * t2 * f.grad_euclid((t1, t2)))

    jac = None
    if f.partials is not None and f.hessian is not None:

        def jac(t1, t2):
            g = np.asarray(f.partials(t1, t2), dtype=float)
            H = np.asarray(f.hessian(t1, t2), dtype=float)
            J = t2 * t2 * H
            J[:, 1] += 2.0 * t2 * g
            return J

    return VectorField2(value, jac)


def curl_oneform(X: VectorField2, x) -> float:
    """Coefficient of ``dt1 ^ dt2`` in the exterior derivative of the metric dual of ``X``.

    The dual one-form is ``X1/t2^2 dt1 + X2/t2^2 dt2``; a gradient field gives 0.
    """
    _, t2 = _coords(x)
    X1, _ = X(x)
    J = X.analytic_partials(x)
    d_second_by_t1 = J[1, 0] / t2**2
    d_first_by_t2 = J[0, 1] / t2**2 - 2.0 * X1 / t2**3
    return float(d_second_by_t1 - d_first_by_t2)
