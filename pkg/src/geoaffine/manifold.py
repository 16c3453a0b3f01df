"""Constant-curvature model spaces.

Four models are supported:

* ``euclidean`` -- R^n with the standard inner product.
* ``sphere`` -- the radius ``1/sqrt(kappa)`` sphere embedded in R^(n+1).
* ``hyperbolic`` -- the hyperboloid ``<x, x>_L = 1/kappa`` (time coordinate
  last, positive) in Minkowski space R^(n,1).
* ``halfplane`` -- the Poincare upper half-plane, metric ``(dt1^2+dt2^2)/t2^2``.

Each model has a batch kernel working on plain arrays with arbitrary leading
axes; the public functions below wrap the kernels with the `Point` /
`TangentVec` contracts.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    AntipodalPair,
    BaseMismatch,
    CutLocusExceeded,
    InvalidPoint,
    InvalidTangent,
    StepTooSmall,
)

#: Distance margin below the diameter bound at which sphere logs are refused.
ANTIPODAL_TOL = 1e-12
#: Default step for finite-difference covariant derivatives.
FD_STEP = 1e-5

_POINT_RTOL = 1e-12
_TANGENT_RTOL = 1e-10
_BASE_RTOL = 1e-9


class Kind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"
    HALFPLANE = "halfplane"


# ---------------------------------------------------------------------------
# batch kernels


def _dot(u, v):
    return np.sum(u * v, axis=-1)


def _norm(v):
    return np.sqrt(_dot(v, v))


def _mink(u, v):
    return np.sum(u[..., :-1] * v[..., :-1], axis=-1) - u[..., -1] * v[..., -1]


def _sinc(x):
    # sin(x)/x with the removable singularity filled in
    return np.sinc(x / np.pi)


def _sinhc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 6.0, np.sinh(safe) / safe)


class _EuclideanKernel:
    def inner(self, x, u, v):
        return _dot(u, v)

    def exp(self, x, v):
        return x + v

    def log(self, x, y):
        return y - x

    def dist(self, x, y):
        return _norm(y - x)

    def velocity(self, x, V, t):
        return np.broadcast_to(V, np.broadcast_shapes(np.shape(V), np.shape(x))).copy()

    def transport(self, x, V, a, b, v):
        return np.array(v, dtype=float, copy=True)

    def project_point(self, x):
        return x

    def project_tangent(self, x, v):
        return v


class _SphereKernel:
    def __init__(self, radius: float):
        self.R = radius

    def inner(self, x, u, v):
        return _dot(u, v)

    def project_point(self, x):
        return x * (self.R / _norm(x))[..., None]

    def project_tangent(self, x, v):
        return v - (_dot(v, x) / self.R**2)[..., None] * x

    def exp(self, x, v):
        th = _norm(v) / self.R
        out = x * np.cos(th)[..., None] + v * _sinc(th)[..., None]
        return self.project_point(out)

    def _angle(self, x, y):
        cosang = _dot(x, y) / self.R**2
        w = y - cosang[..., None] * x
        sinang = _norm(w) / self.R
        return np.arctan2(sinang, cosang), sinang, w

    def log(self, x, y):
        th, sinang, w = self._angle(x, y)
        safe = np.where(sinang > 0, sinang, 1.0)
        factor = np.where(sinang > 0, th / safe, 1.0)
        return self.project_tangent(x, w * factor[..., None])

    def dist(self, x, y):
        return self.R * self._angle(x, y)[0]

    def velocity(self, x, V, t):
        n = _norm(V)
        th = t * n / self.R
        return -x * (n / self.R * np.sin(th))[..., None] + V * np.cos(th)[..., None]

    def transport(self, x, V, a, b, v):
        n = _norm(V)
        xa = self.exp(x, np.asarray(a)[..., None] * V) if np.any(a) else x
        safe = np.where(n > 0, n, 1.0)
        ua = self.velocity(x, V, a) / safe[..., None]
        s = (np.asarray(b) - np.asarray(a)) * n / self.R
        c = _dot(v, ua)
        out = v + c[..., None] * ((np.cos(s) - 1.0)[..., None] * ua - np.sin(s)[..., None] * xa / self.R)
        return np.where((n > 0)[..., None], out, v)


class _HyperbolicKernel:
    def __init__(self, radius: float):
        self.R = radius

    def inner(self, x, u, v):
        return _mink(u, v)

    def project_point(self, x):
        x = np.array(x, dtype=float, copy=True)
        x[..., -1] = np.sqrt(self.R**2 + np.sum(x[..., :-1] ** 2, axis=-1))
        return x

    def project_tangent(self, x, v):
        return v + (_mink(v, x) / self.R**2)[..., None] * x

    def exp(self, x, v):
        th = np.sqrt(np.maximum(_mink(v, v), 0.0)) / self.R
        out = x * np.cosh(th)[..., None] + v * _sinhc(th)[..., None]
        return self.project_point(out)

    def dist(self, x, y):
        d = y - x
        chord = np.sqrt(np.maximum(_mink(d, d), 0.0))
        return 2.0 * self.R * np.arcsinh(chord / (2.0 * self.R))

    def log(self, x, y):
        th = self.dist(x, y) / self.R
        w = y + (_mink(x, y) / self.R**2)[..., None] * x
        return self.project_tangent(x, w / _sinhc(th)[..., None])

    def velocity(self, x, V, t):
        n = np.sqrt(np.maximum(_mink(V, V), 0.0))
        th = t * n / self.R
        return x * (n / self.R * np.sinh(th))[..., None] + V * np.cosh(th)[..., None]

    def transport(self, x, V, a, b, v):
        n = np.sqrt(np.maximum(_mink(V, V), 0.0))
        xa = self.exp(x, np.asarray(a)[..., None] * V) if np.any(a) else x
        safe = np.where(n > 0, n, 1.0)
        ua = self.velocity(x, V, a) / safe[..., None]
        s = (np.asarray(b) - np.asarray(a)) * n / self.R
        c = _mink(v, ua)
        out = v + c[..., None] * ((np.cosh(s) - 1.0)[..., None] * ua + np.sinh(s)[..., None] * xa / self.R)
        return np.where((n > 0)[..., None], out, v)


class _HalfPlaneKernel:
    """Upper half-plane, computed with complex Moebius maps.

    A geodesic leaving ``s1 + i s2`` in direction ``psi`` is the image of the
    vertical geodesic ``i e^s`` under an elliptic rotation about ``i`` by
    ``psi - pi/2`` followed by the affine isometry ``z -> s1 + s2 z``.
    """

    def inner(self, x, u, v):
        return _dot(u, v) / x[..., 1] ** 2

    def project_point(self, x):
        return x

    def project_tangent(self, x, v):
        return v

    @staticmethod
    def _rotation(x, V):
        w = V[..., 0] + 1j * V[..., 1]
        speed = np.abs(w) / x[..., 1]
        half = 0.5 * (np.angle(w) - 0.5 * np.pi)
        return speed, np.cos(half), np.sin(half)

    def _moebius(self, x, V, t):
        speed, c, sn = self._rotation(x, V)
        zeta = 1j * np.exp(t * speed)
        den = c - sn * zeta
        return (c * zeta + sn) / den, zeta, den, speed

    def exp(self, x, v):
        m, *_ = self._moebius(x, v, 1.0)
        return np.stack([x[..., 0] + x[..., 1] * m.real, x[..., 1] * m.imag], axis=-1)

    def velocity(self, x, V, t):
        _, zeta, den, speed = self._moebius(x, V, t)
        dz = x[..., 1] * zeta * speed / den**2
        return np.stack([dz.real, dz.imag], axis=-1)

    @staticmethod
    def _signed_rho(x, y):
        # base x=(s1,s2), target y=(t1,t2); rho = r_xy * (s1 - t1) in closed form
        s1, s2 = x[..., 0], x[..., 1]
        t1, t2 = y[..., 0], y[..., 1]
        d = s1 - t1
        ad = 0.5 * (s2 * s2 - t2 * t2 - d * d)
        rho = np.hypot(ad, s2 * d)
        return np.where(d < 0, -rho, rho), d, ad

    def dist(self, x, y):
        rho, _, _ = self._signed_rho(x, y)
        return np.arcsinh(np.abs(rho) / (x[..., 1] * y[..., 1]))

    def log(self, x, y):
        rho, d, ad = self._signed_rho(x, y)
        s2, t2 = x[..., 1], y[..., 1]
        amp = -np.arcsinh(rho / (s2 * t2))
        safe = np.where(rho != 0, rho, 1.0)
        scale = np.where(rho != 0, s2 * amp / safe, 0.0)
        return np.stack([scale * s2 * d, scale * ad], axis=-1)

    def transport(self, x, V, a, b, v):
        ga = self.velocity(x, V, a)
        gb = self.velocity(x, V, b)
        za = ga[..., 0] + 1j * ga[..., 1]
        zb = gb[..., 0] + 1j * gb[..., 1]
        moving = np.abs(za) > 0
        rot = np.where(moving, (zb / np.where(moving, np.abs(zb), 1.0)) * np.conj(za) / np.where(moving, np.abs(za), 1.0), 1.0)
        xa = self.exp(x, np.asarray(a)[..., None] * V)
        xb = self.exp(x, np.asarray(b)[..., None] * V)
        w = (v[..., 0] + 1j * v[..., 1]) * rot * (xb[..., 1] / xa[..., 1])
        return np.stack([w.real, w.imag], axis=-1)


# ---------------------------------------------------------------------------
# contract types


@dataclass(frozen=True)
class SpaceSpec:
    """Which model space, its dimension and curvature."""

    kind: Kind
    dim: int
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "kappa", float(self.kappa))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        k = self.kappa
        ok = {
            Kind.EUCLIDEAN: k == 0.0,
            Kind.SPHERE: k > 0.0,
            Kind.HYPERBOLIC: k < 0.0,
            Kind.HALFPLANE: k == -1.0 and self.dim == 2,
        }[self.kind]
        if not ok:
            raise ValueError(f"curvature {k} and dim {self.dim} are incompatible with {self.kind.value}")

    @classmethod
    def euclidean(cls, dim: int = 2) -> "SpaceSpec":
        return cls(Kind.EUCLIDEAN, dim, 0.0)

    @classmethod
    def sphere(cls, dim: int = 2, kappa: float = 1.0) -> "SpaceSpec":
        return cls(Kind.SPHERE, dim, kappa)

    @classmethod
    def hyperbolic(cls, dim: int = 2, kappa: float = -1.0) -> "SpaceSpec":
        return cls(Kind.HYPERBOLIC, dim, kappa)

    @classmethod
    def halfplane(cls) -> "SpaceSpec":
        return cls(Kind.HALFPLANE, 2, -1.0)

    @property
    def diameter_bound(self) -> float:
        return math.pi / math.sqrt(self.kappa) if self.kappa > 0 else math.inf

    @property
    def radius(self) -> float:
        """Model radius ``1/sqrt(|kappa|)``; infinite for flat space."""
        return 1.0 / math.sqrt(abs(self.kappa)) if self.kappa else math.inf

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1 if self.kind in (Kind.SPHERE, Kind.HYPERBOLIC) else self.dim

    @property
    def kernel(self):
        return _kernel(self.kind, self.kappa)

    def point(self, coords: Sequence[float]) -> "Point":
        return Point(self, coords)

    def tangent(self, base: "Point", comps: Sequence[float]) -> "TangentVec":
        return TangentVec(base, comps)

    def origin(self) -> "Point":
        """A canonical base point: 0, the north pole, the hyperboloid vertex, or (0, 1)."""
        c = np.zeros(self.ambient_dim)
        if self.kind is Kind.HALFPLANE:
            c[1] = 1.0
        elif self.kind in (Kind.SPHERE, Kind.HYPERBOLIC):
            c[-1] = self.radius
        return Point(self, c)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "dim": self.dim, "kappa": self.kappa}

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceSpec":
        return cls(Kind(d["kind"]), int(d["dim"]), float(d["kappa"]))


@functools.lru_cache(maxsize=None)
def _kernel(kind: Kind, kappa: float):
    if kind is Kind.EUCLIDEAN:
        return _EuclideanKernel()
    if kind is Kind.SPHERE:
        return _SphereKernel(1.0 / math.sqrt(kappa))
    if kind is Kind.HYPERBOLIC:
        return _HyperbolicKernel(1.0 / math.sqrt(-kappa))
    return _HalfPlaneKernel()


def _frozen_array(values, size: int, what: str, error: type) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (size,):
        raise error(f"{what} needs {size} coordinates, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise error(f"{what} has non-finite coordinates")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Point:
    space: SpaceSpec
    coords: np.ndarray

    def __post_init__(self):
        c = _frozen_array(self.coords, self.space.ambient_dim, "point", InvalidPoint)
        object.__setattr__(self, "coords", c)
        kind = self.space.kind
        if kind is Kind.SPHERE:
            r = self.space.radius
            if abs(np.linalg.norm(c) - r) > _POINT_RTOL * r:
                raise InvalidPoint(f"point {c} is not on the sphere of radius {r}")
        elif kind is Kind.HYPERBOLIC:
            scale = float(c @ c)
            if c[-1] <= 0 or abs(_mink(c, c) - 1.0 / self.space.kappa) > _POINT_RTOL * max(scale, 1.0 / -self.space.kappa):
                raise InvalidPoint(f"point {c} is not on the upper hyperboloid sheet")
        elif kind is Kind.HALFPLANE and c[1] <= 0:
            raise InvalidPoint(f"half-plane point needs t2 > 0, got {c}")

    def __repr__(self):
        return f"Point({self.space.kind.value}, {self.coords.tolist()})"

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "coords": self.coords.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Point":
        return cls(SpaceSpec.from_dict(d["space"]), d["coords"])


@dataclass(frozen=True, eq=False)
class TangentVec:
    base: Point
    comps: np.ndarray

    def __post_init__(self):
        space = self.base.space
        c = _frozen_array(self.comps, space.ambient_dim, "tangent vector", InvalidTangent)
        object.__setattr__(self, "comps", c)
        if space.kind in (Kind.SPHERE, Kind.HYPERBOLIC):
            x = self.base.coords
            ortho = abs(float(x @ c)) if space.kind is Kind.SPHERE else abs(float(_mink(x, c)))
            scale = np.linalg.norm(x) / space.radius
            if ortho > _TANGENT_RTOL * np.linalg.norm(c) * scale * space.radius:
                raise InvalidTangent(f"vector {c} is not tangent at {x}")

    @property
    def space(self) -> SpaceSpec:
        return self.base.space

    def __repr__(self):
        return f"TangentVec(at {self.base.coords.tolist()}, {self.comps.tolist()})"

    # arithmetic results are re-projected: cancellation leaves roundoff relative
    # to the operands, not to the (possibly tiny) result

    def __mul__(self, s: float) -> "TangentVec":
        return _tangent(self.base, self.comps * float(s))

    __rmul__ = __mul__

    def __add__(self, other: "TangentVec") -> "TangentVec":
        _require_same_base(self.base, other.base)
        return _tangent(self.base, self.comps + other.comps)

    def __sub__(self, other: "TangentVec") -> "TangentVec":
        _require_same_base(self.base, other.base)
        return _tangent(self.base, self.comps - other.comps)

    def __neg__(self) -> "TangentVec":
        return TangentVec(self.base, -self.comps)

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "base": self.base.coords.tolist(), "coords": self.comps.tolist()}


def same_point(x: Point, y: Point, rtol: float = _BASE_RTOL) -> bool:
    if x is y:
        return True
    if x.space != y.space:
        return False
    scale = 1.0 + max(np.abs(x.coords).max(), np.abs(y.coords).max())
    return bool(np.abs(x.coords - y.coords).max() <= rtol * scale)


def _require_same_base(x: Point, y: Point) -> None:
    if not same_point(x, y):
        raise BaseMismatch(f"tangent vector anchored at {x.coords.tolist()}, expected {y.coords.tolist()}")


def _require_space(space: SpaceSpec, *points: Point) -> None:
    for p in points:
        if p.space != space:
            raise ValueError(f"{p!r} does not live in {space}")


def _tangent(base: Point, comps) -> TangentVec:
    return TangentVec(base, base.space.kernel.project_tangent(base.coords, np.asarray(comps, dtype=float)))


# ---------------------------------------------------------------------------
# operations


def inner(space: SpaceSpec, u: TangentVec, v: TangentVec) -> float:
    """Riemannian inner product of two tangent vectors at the same point."""
    _require_space(space, u.base, v.base)
    _require_same_base(u.base, v.base)
    return float(space.kernel.inner(u.base.coords, u.comps, v.comps))


def norm(space: SpaceSpec, v: TangentVec) -> float:
    return math.sqrt(max(inner(space, v, v), 0.0))


def exp_map(space: SpaceSpec, x: Point, v: TangentVec) -> Point:
    """Endpoint of the unit-time geodesic leaving ``x`` with velocity ``v``.

    Raises
    ------
    BaseMismatch
        If ``v`` is not anchored at ``x``.
    CutLocusExceeded
        On a sphere when ``|v|`` reaches the diameter bound.
    """
    _require_space(space, x)
    _require_same_base(v.base, x)
    if space.kind is Kind.SPHERE and norm(space, v) >= space.diameter_bound:
        raise CutLocusExceeded(f"|v| = {norm(space, v)} >= D = {space.diameter_bound}")
    return Point(space, space.kernel.exp(x.coords, v.comps))


def distance(space: SpaceSpec, x: Point, y: Point) -> float:
    _require_space(space, x, y)
    if x is y:
        return 0.0
    return float(space.kernel.dist(x.coords, y.coords))


def log_map(space: SpaceSpec, x: Point, y: Point) -> TangentVec:
    """Initial velocity at ``x`` of the minimal geodesic reaching ``y`` at time 1.

    ``log_map(x, x)`` is the zero vector.  On a sphere, pairs within
    `ANTIPODAL_TOL` of the diameter bound raise `AntipodalPair`.
    """
    _require_space(space, x, y)
    if space.kind is Kind.SPHERE:
        d = distance(space, x, y)
        if d >= space.diameter_bound - ANTIPODAL_TOL:
            raise AntipodalPair(f"d(x, y) = {d} is at the diameter bound {space.diameter_bound}")
    return _tangent(x, space.kernel.log(x.coords, y.coords))


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    """``t -> exp_map(start, t * initial_velocity)``; reaches ``end`` at t = 1."""

    space: SpaceSpec
    start: Point
    end: Point
    initial_velocity: TangentVec

    @classmethod
    def from_velocity(cls, space: SpaceSpec, x: Point, v: TangentVec) -> "GeodesicSegment":
        return cls(space, x, exp_map(space, x, v), v)

    @property
    def length(self) -> float:
        return norm(self.space, self.initial_velocity)

    def eval(self, t: float) -> Point:
        if t == 0:
            return self.start
        if t == 1:
            return self.end
        k = self.space.kernel
        return Point(self.space, k.exp(self.start.coords, t * self.initial_velocity.comps))

    def eval_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return self.space.kernel.exp(self.start.coords, ts[:, None] * self.initial_velocity.comps)

    def velocity(self, t: float) -> TangentVec:
        k = self.space.kernel
        return _tangent(self.eval(t), k.velocity(self.start.coords, self.initial_velocity.comps, t))


def geodesic(space: SpaceSpec, x: Point, y: Point) -> GeodesicSegment:
    """The minimal geodesic from ``x`` to ``y`` (constant curve if they coincide)."""
    return GeodesicSegment(space, x, y, log_map(space, x, y))


def parallel_transport(space: SpaceSpec, seg: GeodesicSegment, v: TangentVec, a: float, b: float) -> TangentVec:
    """Transport ``v`` from ``seg(a)`` to ``seg(b)`` along the geodesic carrying ``seg``."""
    _require_space(space, seg.start)
    _require_same_base(v.base, seg.eval(a))
    target = seg.eval(b)
    if a == b:
        return TangentVec(target, v.comps)
    k = space.kernel
    out = k.transport(seg.start.coords, seg.initial_velocity.comps, float(a), float(b), v.comps)
    return _tangent(target, out)


def transport_between(space: SpaceSpec, x: Point, y: Point, v: TangentVec) -> TangentVec:
    """Parallel transport along the minimal geodesic from ``x`` to ``y``."""
    return parallel_transport(space, geodesic(space, x, y), v, 0.0, 1.0)


def covariant_derivative_fd(
    space: SpaceSpec,
    field: Callable[[Point], TangentVec],
    x: Point,
    direction: TangentVec,
    h: float = FD_STEP,
) -> TangentVec:
    """Central-difference covariant derivative of ``field`` along ``direction``.

    Field values at ``gamma(+h)`` and ``gamma(-h)`` are parallel-transported
    back to ``x`` along ``gamma(t) = exp_x(t * direction)`` before differencing,
    so the result is second-order accurate in ``h``.
    """
    if not h >= 1e-12:
        raise StepTooSmall(f"finite-difference step {h} is below 1e-12")
    seg = GeodesicSegment.from_velocity(space, x, direction)
    fwd = parallel_transport(space, seg, field(seg.eval(h)), h, 0.0)
    bwd = parallel_transport(space, seg, field(seg.eval(-h)), -h, 0.0)
    return _tangent(x, (fwd.comps - bwd.comps) / (2.0 * h))


def tangent_basis(space: SpaceSpec, x: Point) -> list[TangentVec]:
    """An orthonormal basis of the tangent space at ``x``."""
    k = space.kernel
    if space.kind is Kind.EUCLIDEAN:
        vecs = np.eye(space.dim)
    elif space.kind is Kind.HALFPLANE:
        vecs = np.eye(2) * x.coords[1]
    elif space.kind is Kind.SPHERE:
        m = np.column_stack([x.coords, np.eye(space.ambient_dim)])
        q, _ = np.linalg.qr(m)
        vecs = q[:, 1:].T
    else:
        # move the standard frame at the vertex along the geodesic to x
        o = space.origin()
        V = k.log(o.coords, x.coords)
        frame = np.eye(space.ambient_dim)[: space.dim]
        vecs = np.array([k.transport(o.coords, V, 0.0, 1.0, e) for e in frame])
    return [_tangent(x, v) for v in vecs]
