"""Sub-level sets of ``f0``, convexity scans and geodesic-triangle comparisons."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .affine import AffineProbe, f0_batch, f0_value
from .errors import DegenerateTriangle, EmptySublevel
from .manifold import (
    Point,
    SpaceSpec,
    exp_map,
    log_map,
    norm,
    tangent_basis,
    transport_between,
)
from .sampling import DEFAULT_SEED, ball_points, default_radius

#: a chord point counts as outside the sub-level set when f0 exceeds c by more than this
VIOLATION_TOL = 1e-12
#: Gram determinant floor, relative to |log_y p|^2 |log_y q|^2
GRAM_RTOL = 1e-14
#: tolerance on the identity f0(gamma(t)) = a f0(p) + b f0(q)
CERTIFICATE_TOL = 1e-8
MIN_ANGLE = 0.05
MIN_SIDE = 1e-6


def sublevel_membership(probe: AffineProbe, c: float, x: Point) -> bool:
    return f0_value(probe, x) <= c


# ---------------------------------------------------------------------------
# triangles


@dataclass(frozen=True)
class TriangleData:
    """Vertices, opposite side lengths ``l_i = d(p_{i+1}, p_{i-1})`` and inner angles."""

    vertices: tuple
    sides: tuple
    angles: tuple

    @property
    def perimeter(self) -> float:
        return float(sum(self.sides))


@dataclass(frozen=True)
class ComboCoefficients:
    """``log_y gamma(t) ~ a_t log_y p + b_t log_y q``; ``span_residual`` is the leftover norm."""

    a_t: float
    b_t: float
    span_residual: float

    @property
    def total(self) -> float:
        return self.a_t + self.b_t


@dataclass(frozen=True)
class ComparisonResult:
    """Planar triangle ``(y~, p~, q~)`` with the two sides and the angle at ``y`` matched.

    ``x_tilde`` lies on ``[p~, q~]`` at the same angle from ``y~p~`` as ``x`` from ``log_y p``.
    """

    plane_vertices: tuple
    x_tilde: tuple
    d_manifold: float
    d_plane: float


@dataclass(frozen=True)
class LawOfCosinesReport:
    """``expressions[i] = l_i^2 - (l_{i-1}^2 + l_{i+1}^2 - 2 l_{i-1} l_{i+1} cos angle_i)``."""

    kappa: float
    expressions: tuple

    @property
    def expected_sign(self) -> int:
        return int(np.sign(-self.kappa))

    @property
    def margin(self) -> float:
        """Smallest signed distance from the wrong side; positive when the strict inequality holds."""
        if self.kappa == 0:
            return -max(abs(e) for e in self.expressions)
        return min(self.expected_sign * e for e in self.expressions)

    @property
    def holds(self) -> bool:
        return self.margin > 0 if self.kappa != 0 else True


def _angles(k, x, u, v):
    nu = np.sqrt(np.maximum(k.inner(x, u, u), 0.0))
    nv = np.sqrt(np.maximum(k.inner(x, v, v), 0.0))
    cosang = k.inner(x, u, v) / (nu * nv)
    return np.arccos(np.clip(cosang, -1.0, 1.0))


def _triangle_arrays(space: SpaceSpec, P1, P2, P3):
    k = space.kernel
    sides = np.stack([k.dist(P2, P3), k.dist(P3, P1), k.dist(P1, P2)], axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        angles = np.stack(
            [
                _angles(k, P1, k.log(P1, P2), k.log(P1, P3)),
                _angles(k, P2, k.log(P2, P3), k.log(P2, P1)),
                _angles(k, P3, k.log(P3, P1), k.log(P3, P2)),
            ],
            axis=-1,
        )
    return sides, angles


def _check_perimeter(space: SpaceSpec, sides) -> None:
    per = float(np.sum(sides))
    if not per < 2.0 * space.diameter_bound:
        raise DegenerateTriangle(f"perimeter {per} is not below 2 D = {2 * space.diameter_bound}")


def triangle(space: SpaceSpec, p1: Point, p2: Point, p3: Point) -> TriangleData:
    sides, angles = _triangle_arrays(space, p1.coords, p2.coords, p3.coords)
    _check_perimeter(space, sides)
    if np.min(sides) <= 0 or not np.all(np.isfinite(angles)):
        raise DegenerateTriangle("triangle has coincident vertices")
    return TriangleData((p1, p2, p3), tuple(float(s) for s in sides), tuple(float(a) for a in angles))


def _chord_points(k, P, Q, ts):
    """``gamma_{PQ}(t)`` for every pair and every ``t``; result shape ``(N, len(ts), d)``."""
    V = k.log(P, Q)
    return k.exp(P[:, None, :], ts[None, :, None] * V[:, None, :])


def _combo_arrays(k, y, A, B, X):
    """Gram-system coefficients of ``X`` against ``A``, ``B`` (tangent at ``y``).

    ``A``, ``B`` have shape ``(N, d)``; ``X`` has shape ``(N, S, d)``.
    Returns ``a, b, residual, degenerate`` with the first three shaped ``(N, S)``.
    """
    # The normal equations square the condition number; orthonormalize instead.
    yy = y[:, None, :] if np.ndim(y) == 2 else y
    AA = k.inner(y, A, A)
    BB = k.inner(y, B, B)
    nA = np.sqrt(np.where(AA > 0, AA, 1.0))
    E1 = A / nA[:, None]
    B1 = k.inner(y, B, E1)
    Bp = B - B1[:, None] * E1
    Bp = Bp - k.inner(y, Bp, E1)[:, None] * E1
    PP = k.inner(y, Bp, Bp)
    # PP / BB is the Gram determinant divided by |A|^2 |B|^2
    degenerate = ~(PP >= GRAM_RTOL * BB) | (AA <= 0) | (BB <= 0)
    nP = np.sqrt(np.where(degenerate, 1.0, PP))
    E2 = Bp / nP[:, None]
    x1 = k.inner(yy, X, E1[:, None, :])
    x2 = k.inner(yy, X, E2[:, None, :])
    b = x2 / nP[:, None]
    a = (x1 - b * B1[:, None]) / nA[:, None]
    R = X - a[..., None] * A[:, None, :] - b[..., None] * B[:, None, :]
    resid = np.sqrt(np.maximum(k.inner(yy, R, R), 0.0))
    return a, b, resid, degenerate


def combination_coefficients(space: SpaceSpec, y: Point, p: Point, q: Point, t: float) -> ComboCoefficients:
    """Project ``log_y gamma_pq(t)`` onto ``span{log_y p, log_y q}`` through the Gram system."""
    sides, _ = _triangle_arrays(space, y.coords, p.coords, q.coords)
    _check_perimeter(space, sides)
    k = space.kernel
    A = log_map(space, y, p).comps[None, :]
    B = log_map(space, y, q).comps[None, :]
    X = _chord_points(k, p.coords[None, :], q.coords[None, :], np.array([float(t)]))
    X = k.log(y.coords, X)
    a, b, r, deg = _combo_arrays(k, y.coords[None, :], A, B, X)
    if deg[0]:
        raise DegenerateTriangle("log_y p and log_y q are (nearly) linearly dependent")
    return ComboCoefficients(float(a[0, 0]), float(b[0, 0]), float(r[0, 0]))


def _comparison_arrays(k, Y, P, Q, t):
    """Vectorized `comparison_triangle`; ``t`` has one entry per triangle."""
    A = k.log(Y, P)
    B = k.log(Y, Q)
    X = k.exp(P, t[:, None] * k.log(P, Q))
    LX = k.log(Y, X)
    la = np.sqrt(k.inner(Y, A, A))
    lb = np.sqrt(k.inner(Y, B, B))
    theta = _angles(k, Y, A, B)
    phi = _angles(k, Y, A, LX)
    pt = np.stack([la, np.zeros_like(la)], axis=-1)
    qt = np.stack([lb * np.cos(theta), lb * np.sin(theta)], axis=-1)
    e = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    w = qt - pt

    def cross(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    lam = cross(pt, w) / cross(e, w)
    d_m = np.sqrt(np.maximum(k.inner(Y, LX, LX), 0.0))
    return pt, qt, lam[:, None] * e, d_m, lam


def comparison_triangle(space: SpaceSpec, y: Point, p: Point, q: Point, t: float) -> ComparisonResult:
    """Planar comparison for ``x = gamma_pq(t)``: returns ``d(y, x)`` and ``|y~ x~|``."""
    tri = triangle(space, y, p, q)
    if min(tri.angles) <= 0 or max(tri.angles) >= math.pi:
        raise DegenerateTriangle("comparison needs a nondegenerate angle at every vertex")
    pt, qt, xt, dm, dp = _comparison_arrays(space.kernel, y.coords[None], p.coords[None], q.coords[None], np.array([float(t)]))
    return ComparisonResult(
        ((0.0, 0.0), tuple(pt[0].tolist()), tuple(qt[0].tolist())),
        tuple(xt[0].tolist()),
        float(dm[0]),
        float(dp[0]),
    )


def _cosine_expressions(sides, angles):
    out = []
    for i in range(3):
        lp, ln = sides[..., (i - 1) % 3], sides[..., (i + 1) % 3]
        out.append(sides[..., i] ** 2 - (lp**2 + ln**2 - 2.0 * lp * ln * np.cos(angles[..., i])))
    return np.stack(out, axis=-1)


def law_of_cosines_check(space: SpaceSpec, p1: Point, p2: Point, p3: Point) -> LawOfCosinesReport:
    tri = triangle(space, p1, p2, p3)
    if min(tri.angles) <= 0:
        raise DegenerateTriangle("degenerate triangle")
    ex = _cosine_expressions(np.array(tri.sides), np.array(tri.angles))
    return LawOfCosinesReport(space.kappa, tuple(float(e) for e in ex))


@dataclass
class TriangleSuiteReport:
    space: SpaceSpec
    n: int
    seed: int
    excluded: int
    min_a: float
    min_b: float
    min_sum: float
    max_sum: float
    max_span_residual: float
    cosine_min: float
    cosine_max: float
    cosine_margin: float
    comparison_slack: float

    @property
    def combination_holds(self) -> bool:
        ok = self.min_a > 0 and self.min_b > 0 and self.max_span_residual < 1e-8
        if self.space.kappa > 0:
            return ok and self.min_sum >= 1 - 1e-9
        if self.space.kappa < 0:
            return ok and self.max_sum <= 1 + 1e-9
        return ok and max(abs(self.min_sum - 1), abs(self.max_sum - 1)) < 1e-10

    @property
    def cosine_holds(self) -> bool:
        if self.space.kappa == 0:
            return self.cosine_margin >= -1e-10
        return self.cosine_margin > 1e-10

    @property
    def comparison_holds(self) -> bool:
        return self.comparison_slack >= -1e-10

    @property
    def all_hold(self) -> bool:
        return self.combination_holds and self.cosine_holds and self.comparison_holds

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "n": self.n,
            "seed": self.seed,
            "excluded": self.excluded,
            "combination": {
                "min_a": self.min_a,
                "min_b": self.min_b,
                "min_sum": self.min_sum,
                "max_sum": self.max_sum,
                "max_span_residual": self.max_span_residual,
                "holds": self.combination_holds,
            },
            "law_of_cosines": {
                "min_expression": self.cosine_min,
                "max_expression": self.cosine_max,
                "margin": self.cosine_margin,
                "holds": self.cosine_holds,
            },
            "comparison": {"min_slack": self.comparison_slack, "holds": self.comparison_holds},
        }


def random_triangles(space: SpaceSpec, n: int, rng: np.random.Generator, radius: Optional[float] = None):
    """``n`` nondegenerate triangles in the default sampling ball about the origin.

    Rejects perimeter >= 2 D, min angle < `MIN_ANGLE` and min side < `MIN_SIDE`.
    Returns the three vertex arrays and the number of rejected draws.
    """
    radius = default_radius(space) if radius is None else radius
    o = space.origin()
    got = [[], [], []]
    have = excluded = 0
    while have < n:
        m = max(2 * (n - have), 64)
        V = [ball_points(space, o, radius, m, rng) for _ in range(3)]
        sides, angles = _triangle_arrays(space, *V)
        ok = (
            (np.sum(sides, axis=-1) < 2.0 * space.diameter_bound)
            & (np.min(sides, axis=-1) >= MIN_SIDE)
            & np.all(np.isfinite(angles), axis=-1)
            & (np.min(angles, axis=-1) >= MIN_ANGLE)
        )
        idx = np.flatnonzero(ok)[: n - have]
        excluded += int(np.count_nonzero(~ok[: idx[-1] + 1])) if idx.size else m
        for g, v in zip(got, V):
            g.append(v[idx])
        have += idx.size
    return tuple(np.concatenate(g) for g in got), excluded


def triangle_suite(space: SpaceSpec, n: int = 1000, seed: int = DEFAULT_SEED) -> TriangleSuiteReport:
    """Seeded triangle statistics: combination coefficients, law of cosines and distance comparison."""
    rng = np.random.default_rng(seed)
    (P1, P2, P3), excluded = random_triangles(space, n, rng)
    t = rng.random(n)
    k = space.kernel
    sides, angles = _triangle_arrays(space, P1, P2, P3)
    ex = _cosine_expressions(sides, angles)

    A, B = k.log(P1, P2), k.log(P1, P3)
    X = k.log(P1[:, None, :], k.exp(P2, t[:, None] * k.log(P2, P3))[:, None, :])
    a, b, resid, deg = _combo_arrays(k, P1, A, B, X)
    a, b, resid = a[:, 0], b[:, 0], resid[:, 0]
    if np.any(deg):
        raise DegenerateTriangle("a sampled triangle has dependent edge vectors")
    s = a + b

    *_, dm, dp = _comparison_arrays(k, P1, P2, P3, t)
    if space.kappa > 0:
        slack, margin = dm - dp, np.min(-ex)
    elif space.kappa < 0:
        slack, margin = dp - dm, np.min(ex)
    else:
        slack, margin = -np.abs(dm - dp), -np.max(np.abs(ex))
    return TriangleSuiteReport(
        space=space,
        n=n,
        seed=seed,
        excluded=excluded,
        min_a=float(a.min()),
        min_b=float(b.min()),
        min_sum=float(s.min()),
        max_sum=float(s.max()),
        max_span_residual=float(resid.max()),
        cosine_min=float(ex.min()),
        cosine_max=float(ex.max()),
        cosine_margin=float(margin),
        comparison_slack=float(np.min(slack)),
    )


# ---------------------------------------------------------------------------
# convexity scans


class ScanVerdict(str, enum.Enum):
    WITNESS_FOUND = "WitnessFound"
    NO_WITNESS = "NoWitnessAtBudget"


@dataclass(frozen=True)
class Witness:
    p: Point
    q: Point
    t: float
    value: float

    def to_dict(self) -> dict:
        return {"p": self.p.coords.tolist(), "q": self.q.coords.tolist(), "t": self.t, "f0": self.value}


@dataclass(frozen=True)
class Certificate:
    """Pointwise check of ``f0(gamma(t)) = a_t f0(p) + b_t f0(q)`` with base ``x0``.

    ``chain_applicable`` marks levels where the identity forces membership:
    ``c >= 0`` with ``a_t + b_t <= 1`` (kappa <= 0) or ``c <= 0`` with
    ``a_t + b_t >= 1`` (kappa >= 0).
    """

    n_points: int
    n_degenerate: int
    max_identity_residual: float
    min_a: float
    min_b: float
    min_sum: float
    max_sum: float
    chain_applicable: bool
    chain_violations: int

    @property
    def identity_holds(self) -> bool:
        return self.n_points > 0 and self.max_identity_residual <= CERTIFICATE_TOL and self.min_a > 0 and self.min_b > 0

    @property
    def holds(self) -> bool:
        return self.identity_holds and (not self.chain_applicable or self.chain_violations == 0)

    def to_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "n_degenerate": self.n_degenerate,
            "max_identity_residual": self.max_identity_residual,
            "min_a": self.min_a,
            "min_b": self.min_b,
            "min_sum": self.min_sum,
            "max_sum": self.max_sum,
            "chain_applicable": self.chain_applicable,
            "chain_violations": self.chain_violations,
            "holds": self.holds,
        }


@dataclass
class ConvexityReport:
    probe: AffineProbe
    c: float
    n_pairs: int
    n_steps: int
    seed: int
    verdict: ScanVerdict
    witness: Optional[Witness] = None
    n_injected: int = 0
    certificate: Optional[Certificate] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "probe": self.probe.to_dict(),
            "c": self.c,
            "n_pairs": self.n_pairs,
            "n_steps": self.n_steps,
            "seed": self.seed,
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "n_injected": self.n_injected,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "notes": list(self.notes),
        }


def sample_sublevel(
    probe: AffineProbe,
    c: float,
    n: int,
    rng: np.random.Generator,
    radius: Optional[float] = None,
    max_draws: Optional[int] = None,
) -> np.ndarray:
    """Up to ``n`` members of ``{f0 <= c}``, uniform in the exp-chart ball at ``x0``.

    Raises `EmptySublevel` if fewer than two members turn up within ``max_draws``
    candidates (default ``max(200 n, 100000)``).
    """
    space = probe.space
    radius = default_radius(space) if radius is None else radius
    max_draws = max(200 * n, 100_000) if max_draws is None else max_draws
    found, drawn, have = [], 0, 0
    while have < n and drawn < max_draws:
        m = min(max(4 * (n - have), 1024), max_draws - drawn)
        pts = ball_points(space, probe.x0, radius, m, rng)
        drawn += m
        keep = pts[f0_batch(probe, pts) <= c][: n - have]
        found.append(keep)
        have += len(keep)
    members = np.concatenate(found) if found else np.empty((0, space.ambient_dim))
    if len(members) < 2:
        raise EmptySublevel(f"found {len(members)} member(s) of the sub-level set at c = {c} in {drawn} draws")
    return members


def _pairs_from(members: np.ndarray, n_pairs: int, rng: np.random.Generator):
    if len(members) >= 2 * n_pairs:
        return members[0::2][:n_pairs], members[1::2][:n_pairs]
    i = rng.integers(0, len(members), n_pairs)
    j = (i + rng.integers(1, len(members), n_pairs)) % len(members)
    return members[i], members[j]


def _certificate(probe: AffineProbe, c: float, P, Q, pts) -> Certificate:
    k = probe.space.kernel
    x0 = probe.x0.coords
    A, B, X = k.log(x0, P), k.log(x0, Q), k.log(x0, pts)
    a, b, _, deg = _combo_arrays(k, np.broadcast_to(x0, P.shape), A, B, X)
    fP, fQ, fG = f0_batch(probe, P), f0_batch(probe, Q), f0_batch(probe, pts)
    use = ~deg & np.isfinite(fP) & np.isfinite(fQ)
    a, b, fG = a[use], b[use], fG[use]
    fP, fQ = fP[use][:, None], fQ[use][:, None]
    if a.size == 0:
        return Certificate(0, int(np.count_nonzero(~use)), math.nan, math.nan, math.nan, math.nan, math.nan, False, 0)
    resid = np.abs(fG - (a * fP + b * fQ))
    s = a + b
    kappa = probe.space.kappa
    applicable = (kappa <= 0 and c >= 0) or (kappa >= 0 and c <= 0)
    violations = 0
    if applicable:
        bound = c * s
        violations = int(np.count_nonzero((fG > bound + CERTIFICATE_TOL) | (bound > c + CERTIFICATE_TOL)))
    return Certificate(
        n_points=int(a.size),
        n_degenerate=int(np.count_nonzero(~use)),
        max_identity_residual=float(resid.max()),
        min_a=float(a.min()),
        min_b=float(b.min()),
        min_sum=float(s.min()),
        max_sum=float(s.max()),
        chain_applicable=applicable,
        chain_violations=violations,
    )


def _refine(probe: AffineProbe, p: np.ndarray, q: np.ndarray, ts: np.ndarray, j: int):
    """Maximize f0 along the chord near grid index ``j``; returns ``(t, value)``."""
    k = probe.space.kernel
    V = k.log(p, q)

    def f(t):
        return float(f0_batch(probe, k.exp(p, t * V))[()])

    lo = ts[j - 1] if j > 0 else 0.0
    hi = ts[j + 1] if j + 1 < len(ts) else 1.0
    t0, v0 = float(ts[j]), f(float(ts[j]))
    if not math.isfinite(v0):
        return t0, v0
    res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if res.success and -res.fun > v0:
        return float(res.x), float(-res.fun)
    return t0, v0


def convexity_scan(
    probe: AffineProbe,
    c: float,
    n_pairs: int = 500,
    n_steps: int = 64,
    seed: int = DEFAULT_SEED,
    inject: Iterable[tuple[Point, Point]] = (),
    radius: Optional[float] = None,
    certify: bool = True,
) -> ConvexityReport:
    """Look for a chord of ``{f0 <= c}`` that leaves the set.

    Injected pairs are scanned first (and must themselves be members); then
    ``n_pairs`` pairs sampled from the sub-level set.  Each chord is evaluated at
    ``t_k = k / (n_steps + 1)``, ``k = 1..n_steps``.  The witness is the first
    violating pair, at its worst parameter refined by a bounded 1-D search.
    """
    if n_pairs < 1 or n_steps < 1:
        raise ValueError("n_pairs and n_steps must be at least 1")
    space = probe.space
    rng = np.random.default_rng(seed)
    inject = list(inject)
    notes = []
    for p, q in inject:
        if not (sublevel_membership(probe, c, p) and sublevel_membership(probe, c, q)):
            raise ValueError(f"injected pair {p.coords.tolist()}, {q.coords.tolist()} is not in the sub-level set at c = {c}")
    members = sample_sublevel(probe, c, 2 * n_pairs, rng, radius)
    if len(members) < 2 * n_pairs:
        notes.append(f"only {len(members)} sub-level members found; pairs drawn with replacement")
    P, Q = _pairs_from(members, n_pairs, rng)
    if inject:
        P = np.concatenate([np.array([p.coords for p, _ in inject]), P])
        Q = np.concatenate([np.array([q.coords for _, q in inject]), Q])

    ts = np.arange(1, n_steps + 1) / (n_steps + 1)
    pts = _chord_points(space.kernel, P, Q, ts)
    vals = f0_batch(probe, pts)
    bad = np.any(vals > c + VIOLATION_TOL, axis=1)

    witness = None
    if np.any(bad):
        i = int(np.argmax(bad))
        j = int(np.argmax(vals[i]))
        t, v = _refine(probe, P[i], Q[i], ts, j)
        witness = Witness(Point(space, P[i]), Point(space, Q[i]), t, v)
    cert = _certificate(probe, c, P, Q, pts) if certify else None
    return ConvexityReport(
        probe=probe,
        c=float(c),
        n_pairs=n_pairs,
        n_steps=n_steps,
        seed=seed,
        verdict=ScanVerdict.WITNESS_FOUND if witness else ScanVerdict.NO_WITNESS,
        witness=witness,
        n_injected=len(inject),
        certificate=cert,
        notes=notes,
    )


def example_chord() -> tuple[Point, Point]:
    """The chord ``(1/2, 1/2)``, ``(-1/2, 1/2)`` of the standard half-plane example."""
    from .halfplane import HALFPLANE

    return HALFPLANE.point([0.5, 0.5]), HALFPLANE.point([-0.5, 0.5])


def _unit_axis_and_normal(probe: AffineProbe):
    space = probe.space
    n0 = probe.u0_norm
    axis = probe.u0 * (1.0 / n0)
    for e in tangent_basis(space, probe.x0):
        w = e - axis * float(space.kernel.inner(probe.x0.coords, e.comps, axis.comps))
        if norm(space, w) > 0.5:
            return axis, w * (1.0 / norm(space, w)), n0
    raise ValueError("space has no direction perpendicular to u0")


def construction_applies(probe: AffineProbe, c: float) -> bool:
    """Whether the necessity construction exists at level ``c``."""
    k = probe.space.kappa
    if k > 0:
        return 0 < c < probe.u0_norm * probe.space.diameter_bound / 2.0
    if k < 0:
        return c < 0
    return False


def necessity_construction(probe: AffineProbe, c: float, grid: int = 4001) -> tuple[Point, Point]:
    """A pair in ``{f0 <= c}`` whose chord leaves the set.

    kappa > 0: start at ``z`` on the axis geodesic with ``f0(z) = c``, step
    ``+-eps`` (``eps = 0.1 D``) along a perpendicular geodesic, then push both
    points outward along the rays from ``x0`` as far as ``f0 <= c`` and the
    ``D/2`` ball allow.  kappa < 0: put ``z`` on the axis at level ``c/2`` and walk
    along the perpendicular geodesic until ``f0 <= c`` on both sides.
    """
    if not construction_applies(probe, c):
        raise ValueError(f"no necessity construction at level {c} for this probe")
    space = probe.space
    axis, normal, n0 = _unit_axis_and_normal(probe)
    k = space.kernel
    x0 = probe.x0
    if space.kappa > 0:
        z = exp_map(space, x0, axis * (c / n0))
        u = transport_between(space, x0, z, normal)
        eps = 0.1 * space.diameter_bound
        out = []
        for sgn in (1.0, -1.0):
            pe = exp_map(space, z, u * (sgn * eps))
            L = log_map(space, x0, pe).comps
            tmax = space.diameter_bound / 2.0 / norm(space, log_map(space, x0, pe))
            ts = np.linspace(1.0, tmax, grid)[:-1]
            cand = k.exp(x0.coords, ts[:, None] * L)
            ok = np.flatnonzero(f0_batch(probe, cand) <= c)
            if ok.size == 0:
                raise ValueError("construction failed: perpendicular offset left the sub-level set")
            out.append(Point(space, cand[ok[-1]]))
        return out[0], out[1]
    z = exp_map(space, x0, axis * (0.5 * c / n0))
    u = transport_between(space, x0, z, normal)
    R = space.radius
    eps = np.arange(1, grid + 1) * (0.025 * R)
    plus = k.exp(z.coords, eps[:, None] * u.comps)
    minus = k.exp(z.coords, -eps[:, None] * u.comps)
    ok = np.flatnonzero((f0_batch(probe, plus) <= c) & (f0_batch(probe, minus) <= c))
    if ok.size == 0:
        raise ValueError("construction failed: no perpendicular offset reaches the level")
    i = ok[0]
    return Point(space, plus[i]), Point(space, minus[i])


@dataclass
class ThresholdTable:
    probe: AffineProbe
    rows: list

    def to_dict(self) -> dict:
        return {"probe": self.probe.to_dict(), "rows": [r.to_dict() for r in self.rows]}


def threshold_experiment(
    probe: AffineProbe,
    c_grid: Sequence[float],
    n_pairs: int = 500,
    n_steps: int = 64,
    seed: int = DEFAULT_SEED,
    inject_construction: bool = True,
    inject_example_chord: bool = False,
    certify: bool = True,
) -> ThresholdTable:
    """`convexity_scan` per level, with the necessity construction injected where it exists."""
    rows = []
    for c in c_grid:
        inject = []
        if inject_example_chord and probe.is_standard_halfplane:
            p, q = example_chord()
            if sublevel_membership(probe, c, p) and sublevel_membership(probe, c, q):
                inject.append((p, q))
        if inject_construction and construction_applies(probe, c):
            inject.append(necessity_construction(probe, c))
        rows.append(convexity_scan(probe, c, n_pairs, n_steps, seed, inject=inject, certify=certify))
    return ThresholdTable(probe, rows)
