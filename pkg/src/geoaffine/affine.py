"""The function ``f0(x) = <u0, log_{x0} x>`` and the transported field ``X0``.

Includes checkers for the three properties that characterize linear affine
functions (path-independent transport of the gradient, gradient equal to the
transported vector, and the affine expansion around ``x0``), a geodesic
Hessian probe, and the fixed half-plane counterexample.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import halfplane as hp
from .errors import InvalidProbe, StepTooSmall
from .manifold import (
    Kind,
    Point,
    SpaceSpec,
    TangentVec,
    covariant_derivative_fd,
    distance,
    exp_map,
    inner,
    log_map,
    norm,
    same_point,
    tangent_basis,
    transport_between,
)
from .sampling import DEFAULT_SEED, ball_sampler, default_radius

ScalarFn = Callable[[Point], float]
Sampler = Callable[[np.random.Generator], Point]

#: default step of the geodesic second difference in `hessian_probe`
HESSIAN_STEP = 1e-3
AFFINE_SHIFT = 0.5
#: step of the five-point gradient stencil; large enough that roundoff stays
#: near 1e-13 on order-one functions, small enough that truncation does too
GRADIENT_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class AffineProbe:
    """Base point ``x0`` and nonzero direction ``u0`` defining ``f0`` and ``X0``."""

    space: SpaceSpec
    x0: Point
    u0: TangentVec

    def __post_init__(self):
        if self.x0.space != self.space:
            raise InvalidProbe(f"x0 does not live in {self.space}")
        if not same_point(self.u0.base, self.x0):
            raise InvalidProbe("u0 must be anchored at x0")
        if not norm(self.space, self.u0) > 0:
            raise InvalidProbe("u0 must be nonzero")

    @classmethod
    def standard_halfplane(cls) -> "AffineProbe":
        """``x0 = (0, 1)``, ``u0 = (0, 1)`` on the half-plane."""
        H = hp.HALFPLANE
        x0 = H.point([0.0, 1.0])
        return cls(H, x0, H.tangent(x0, [0.0, 1.0]))

    @classmethod
    def canonical(cls, space: SpaceSpec, length: float = 1.0) -> "AffineProbe":
        """Probe at `SpaceSpec.origin` along its first orthonormal tangent direction.

        On the half-plane this is the vertical direction, so
        ``canonical(SpaceSpec.halfplane())`` is the standard probe.
        """
        x0 = space.origin()
        basis = tangent_basis(space, x0)
        u = basis[-1] if space.kind is Kind.HALFPLANE else basis[0]
        return cls(space, x0, u * length)

    @property
    def u0_norm(self) -> float:
        return norm(self.space, self.u0)

    @property
    def is_standard_halfplane(self) -> bool:
        return (
            self.space.kind is Kind.HALFPLANE
            and np.array_equal(self.x0.coords, [0.0, 1.0])
            and np.array_equal(self.u0.comps, [0.0, 1.0])
        )

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "x0": self.x0.coords.tolist(), "u0": self.u0.comps.tolist()}


def f0_value(probe: AffineProbe, x: Point) -> float:
    """``<u0, log_{x0} x>``; ``+inf`` outside the ball of radius D/2 when kappa > 0."""
    space = probe.space
    if space.kappa > 0 and distance(space, probe.x0, x) >= space.diameter_bound / 2.0:
        return math.inf
    return inner(space, probe.u0, log_map(space, probe.x0, x))


def f0_batch(probe: AffineProbe, pts: np.ndarray) -> np.ndarray:
    """Vectorized `f0_value` over an array of point coordinates (last axis = coords)."""
    k = probe.space.kernel
    x0 = probe.x0.coords
    logs = k.log(x0, pts)
    vals = k.inner(x0, probe.u0.comps, logs)
    if probe.space.kappa > 0:
        vals = np.where(k.dist(x0, pts) >= probe.space.diameter_bound / 2.0, np.inf, vals)
    return vals


# ---------------------------------------------------------------------------
# closed forms for the standard half-plane probe


def _b_r(t1: float, t2: float) -> tuple[float, float]:
    b = (t1 * t1 + t2 * t2 - 1.0) / (2.0 * t1)
    return b, math.sqrt(b * b + 1.0)


def f0_closed_form_hp(x) -> float:
    """``f0`` of the standard half-plane probe, straight from its piecewise closed form."""
    t1, t2 = hp._coords(x)
    if t1 == 0.0:
        return math.log(t2)
    b, r = _b_r(t1, t2)
    return b / r * (hp.artanh(b / r) - hp.artanh((b - t1) / r))


def f0_partials_hp(x) -> tuple[float, float]:
    """Analytic ``(df0/dt1, df0/dt2)`` of the closed form."""
    t1, t2 = hp._coords(x)
    if t1 == 0.0:
        # f0 is even in t1 and equals ln t2 on the axis
        return 0.0, 1.0 / t2
    b, r = _b_r(t1, t2)
    k = b / r
    A = hp.artanh(k) - hp.artanh((b - t1) / r)
    df_db = A / r**3 + k / r * (1.0 - (1.0 + b * t1) / t2**2)
    db_dt1 = (t1 * t1 - t2 * t2 + 1.0) / (2.0 * t1 * t1)
    db_dt2 = t2 / t1
    return df_db * db_dt1 + b / t2**2, df_db * db_dt2


def x0_closed_form_hp(x) -> np.ndarray:
    """``X0`` of the standard half-plane probe from its closed form."""
    t1, t2 = hp._coords(x)
    if t1 == 0.0:
        return np.array([0.0, t2])
    b, _ = _b_r(t1, t2)
    D = b * b + 1.0
    return np.array([(b * t2 * t2 - t2 * (b - t1)) / D, (b * t2 * (b - t1) + t2 * t2) / D])


def x0_jacobian_hp(x) -> np.ndarray:
    """``J[k, j] = dX0^k/dt_j`` of the closed form, by the chain rule through ``b``."""
    t1, t2 = hp._coords(x)
    if t1 == 0.0:
        return np.array([[2.0 * t2 / (t2 + 1.0), 0.0], [0.0, 1.0]])
    b, _ = _b_r(t1, t2)
    D = b * b + 1.0
    db = np.array([(t1 * t1 - t2 * t2 + 1.0) / (2.0 * t1 * t1), t2 / t1])
    N1 = b * t2 * t2 - t2 * (b - t1)
    N2 = b * t2 * (b - t1) + t2 * t2
    dN1 = (t2 * t2 - t2) * db + np.array([t2, 2.0 * b * t2 - (b - t1)])
    dN2 = (2.0 * b * t2 - t1 * t2) * db + np.array([-b * t2, b * b - b * t1 + 2.0 * t2])
    dD = 2.0 * b * db
    return np.array([(dN1 * D - N1 * dD) / D**2, (dN2 * D - N2 * dD) / D**2])


F0_HALFPLANE = hp.ScalarField2(lambda t1, t2: f0_closed_form_hp((t1, t2)), lambda t1, t2: f0_partials_hp((t1, t2)))
X0_HALFPLANE = hp.VectorField2(lambda t1, t2: tuple(x0_closed_form_hp((t1, t2))), lambda t1, t2: x0_jacobian_hp((t1, t2)))


# ---------------------------------------------------------------------------
# the transported field and gradients


def transport_field(probe: AffineProbe, x: Point) -> TangentVec:
    """``X0(x)``: ``u0`` moved to ``x`` along the minimal geodesic from ``x0``."""
    if same_point(x, probe.x0, rtol=0.0):
        return TangentVec(x, probe.u0.comps)
    return transport_between(probe.space, probe.x0, x, probe.u0)


def gradient_fd(space: SpaceSpec, f: ScalarFn, x: Point, h: float = GRADIENT_STEP) -> TangentVec:
    """Metric-dual gradient from five-point differences along an orthonormal frame at ``x``."""
    if not h >= 1e-12:
        raise StepTooSmall(f"finite-difference step {h} is below 1e-12")
    out = np.zeros(space.ambient_dim)
    for e in tangent_basis(space, x):
        fp, fm = f(exp_map(space, x, e * h)), f(exp_map(space, x, e * -h))
        fp2, fm2 = f(exp_map(space, x, e * (2 * h))), f(exp_map(space, x, e * (-2 * h)))
        df = (8.0 * (fp - fm) - (fp2 - fm2)) / (12.0 * h)
        out += df * e.comps
    return TangentVec(x, space.kernel.project_tangent(x.coords, out))


def hessian_probe(space: SpaceSpec, f: ScalarFn, x: Point, v: TangentVec, h: float = HESSIAN_STEP) -> float:
    """Second derivative of ``t -> f(exp_x(t v))`` at 0, i.e. ``Hess f(v, v)``."""
    if not h >= 1e-12:
        raise StepTooSmall(f"finite-difference step {h} is below 1e-12")
    fp = f(exp_map(space, x, v * h))
    fm = f(exp_map(space, x, v * -h))
    return (fp - 2.0 * f(x) + fm) / (h * h)


# ---------------------------------------------------------------------------
# property checks


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"


@dataclass
class CheckReport:
    property: str
    n: int
    max_residual: float
    worst_sample: list
    verdict: Verdict
    tolerance: float
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "n": self.n,
            "max_residual": self.max_residual,
            "worst_sample": self.worst_sample,
            "verdict": self.verdict.value,
            "tolerance": self.tolerance,
            "notes": list(self.notes),
        }


def _finish(name: str, residuals: Sequence[float], samples: Sequence[list], tol: float, notes=()) -> CheckReport:
    # first index wins ties so merged reports are order-stable
    worst = int(np.argmax(residuals)) if residuals else 0
    mx = float(residuals[worst]) if residuals else 0.0
    return CheckReport(
        property=name,
        n=len(residuals),
        max_residual=mx,
        worst_sample=[p.to_dict() for p in samples[worst]] if samples else [],
        verdict=Verdict.VIOLATED if mx > tol else Verdict.HOLDS,
        tolerance=tol,
        notes=list(notes),
    )


def _draws(sampler: Sampler, n: int, seed: int, k: int) -> list[tuple[Point, ...]]:
    rng = np.random.default_rng(seed)
    return [tuple(sampler(rng) for _ in range(k)) for _ in range(n)]


def check_transport_commutation(
    probe: AffineProbe,
    sampler: Optional[Sampler] = None,
    n: int = 500,
    tol: float = 1e-6,
    seed: int = DEFAULT_SEED,
    include: Iterable[tuple[Point, Point]] = (),
) -> CheckReport:
    """Residual ``|P_{x,x0} u0 - P_{x,z} P_{z,x0} u0|`` over sampled ``(z, x)`` pairs."""
    space = probe.space
    sampler = sampler or ball_sampler(space, probe.x0)
    pairs = list(include) + _draws(sampler, n, seed, 2)
    residuals = []
    for z, x in pairs:
        direct = transport_field(probe, x)
        via = transport_between(space, z, x, transport_field(probe, z))
        residuals.append(norm(space, direct - via))
    return _finish("transport_commutation", residuals, pairs, tol)


def check_gradient_field(
    probe: AffineProbe,
    sampler: Optional[Sampler] = None,
    n: int = 500,
    tol: float = 1e-6,
    seed: int = DEFAULT_SEED,
    include: Iterable[Point] = (),
    h: float = GRADIENT_STEP,
    route: str = "fd",
) -> CheckReport:
    """Residual ``|grad f0(x) - X0(x)|_x`` over sampled points.

    ``route="fd"`` differentiates `f0_value` numerically on any space;
    ``route="closed-form"`` uses the analytic half-plane gradient and needs the
    standard half-plane probe.
    """
    space = probe.space
    if route == "closed-form" and not probe.is_standard_halfplane:
        raise ValueError("the closed-form route exists only for the standard half-plane probe")
    if route not in ("fd", "closed-form"):
        raise ValueError(f"unknown gradient route {route!r}")
    sampler = sampler or ball_sampler(space, probe.x0)
    points = [(p,) for p in include] + _draws(sampler, n, seed, 1)
    residuals = []
    for (x,) in points:
        if route == "fd":
            g = gradient_fd(space, lambda y: f0_value(probe, y), x, h)
        else:
            g = hp.gradient_hp(F0_HALFPLANE, x)
        residuals.append(norm(space, g - transport_field(probe, x)))
    return _finish("gradient_field", residuals, points, tol)


def check_affine_formula(
    space: SpaceSpec,
    f: ScalarFn,
    x0: Point,
    sampler: Optional[Sampler] = None,
    n: int = 500,
    tol: float = 1e-6,
    seed: int = DEFAULT_SEED,
    include: Iterable[Point] = (),
    h: float = GRADIENT_STEP,
) -> CheckReport:
    """Residual ``|f(x) - f(x0) - <grad f(x0), log_{x0} x>|`` over sampled points."""
    sampler = sampler or ball_sampler(space, x0)
    u0 = gradient_fd(space, f, x0, h)
    notes = []
    if norm(space, u0) == 0.0:
        notes.append("gradient at x0 is zero")
    f_x0 = f(x0)
    points = [(p,) for p in include] + _draws(sampler, n, seed, 1)
    residuals = [abs(f(x) - f_x0 - inner(space, u0, log_map(space, x0, x))) for (x,) in points]
    return _finish("affine_formula", residuals, points, tol, notes)


def characterization_checks(probe: AffineProbe, n: int = 500, tol: float = 1e-6, seed: int = DEFAULT_SEED) -> list[CheckReport]:
    """All three characterization checks for one probe, with ``f = f0``.

    The affine-formula check expands around ``exp(x0, AFFINE_SHIFT * e1)``
    rather than ``x0`` itself: around ``x0`` the formula reproduces ``f0`` by
    construction, so it could never fail.
    """
    f = lambda y: f0_value(probe, y)  # noqa: E731
    x1 = affine_expansion_point(probe)
    # stay inside the ball around x0 where f0 is defined
    radius = default_radius(probe.space) - (AFFINE_SHIFT if probe.space.kappa > 0 else 0.0)
    return [
        check_transport_commutation(probe, n=n, tol=tol, seed=seed),
        check_gradient_field(probe, n=n, tol=tol, seed=seed),
        check_affine_formula(probe.space, f, x1, sampler=ball_sampler(probe.space, x1, radius), n=n, tol=tol, seed=seed),
    ]


def affine_expansion_point(probe: AffineProbe) -> Point:
    e1 = tangent_basis(probe.space, probe.x0)[0]
    return exp_map(probe.space, probe.x0, e1 * AFFINE_SHIFT)


# ---------------------------------------------------------------------------
# the half-plane counterexample

#: f0 at (+-1/2, 1/2): -(artanh(2/sqrt5) - artanh(1/sqrt5)) / sqrt5
F0_AT_CHORD_END = -(math.atanh(2 / math.sqrt(5)) - math.atanh(1 / math.sqrt(5))) / math.sqrt(5)
#: f0 at the chord midpoint (0, 1/sqrt2)
F0_AT_CHORD_MID = math.log(1 / math.sqrt(2))
SUBLEVEL_C = -0.4
Z_POINT = (2.0, 1.0)
GRAD_F0_AT_Z = (
    math.sqrt(2) / 8 * math.log(3 + 2 * math.sqrt(2)) + 0.5,
    math.sqrt(2) / 8 * math.log(3 + 2 * math.sqrt(2)) - 0.5,
)
X0_AT_Z = (1.0, 0.0)
COVARIANT_DERIVATIVE_AT_Z = (0.0, 0.5)
CURL_AT_Z = 0.5

#: finite-difference step used for the counterexample's numeric routes
COUNTEREXAMPLE_FD_STEP = 1e-4


@dataclass
class Assertion:
    key: str
    claim: str
    computed: dict
    expected: dict
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "claim": self.claim,
            "computed": self.computed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class CounterexampleReport:
    assertions: list

    @property
    def all_passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {"all_passed": self.all_passed, "assertions": [a.to_dict() for a in self.assertions]}


def _close(a, b, tol) -> bool:
    return bool(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))) <= tol)


def counterexample_suite(tol: Optional[float] = None, h: float = COUNTEREXAMPLE_FD_STEP) -> CounterexampleReport:
    """Reproduce the four failures of ``f0``/``X0`` for the standard half-plane probe.

    (i) the sub-level set at -0.4 is not geodesically convex; (ii) grad f0 and
    X0 differ at z = (2, 1); (iii) X0 is not parallel in the t1 direction at z;
    (iv) the dual one-form of X0 is not closed at z.  ``tol`` overrides every
    per-assertion tolerance.
    """
    from .manifold import geodesic

    probe = AffineProbe.standard_halfplane()
    H = probe.space
    tols = {"i": 1e-9, "ii": 1e-9, "ii-fd": 1e-5, "iii": 1e-6, "iv": 1e-9}
    if tol is not None:
        tols = dict.fromkeys(tols, tol)
    out = []

    x, y = H.point([0.5, 0.5]), H.point([-0.5, 0.5])
    mid = geodesic(H, x, y).eval(0.5)
    fx, fy, fm = f0_value(probe, x), f0_value(probe, y), f0_value(probe, mid)
    ok = (
        _close([fx, fy], [F0_AT_CHORD_END] * 2, tols["i"])
        and _close(fm, F0_AT_CHORD_MID, tols["i"])
        and _close(mid.coords, [0.0, 1 / math.sqrt(2)], tols["i"])
        and max(fx, fy) <= SUBLEVEL_C < fm
    )
    out.append(
        Assertion(
            "i",
            "f0 is not quasi-convex: both chord ends lie in the sub-level set at -0.4, the midpoint does not",
            {"f0_x": fx, "f0_y": fy, "midpoint": mid.coords.tolist(), "f0_midpoint": fm},
            {"f0_x": F0_AT_CHORD_END, "f0_y": F0_AT_CHORD_END, "midpoint": [0.0, 1 / math.sqrt(2)], "f0_midpoint": F0_AT_CHORD_MID, "c": SUBLEVEL_C},
            tols["i"],
            ok,
        )
    )

    z = H.point(Z_POINT)
    grad = hp.gradient_hp(F0_HALFPLANE, z).comps
    grad_fd = gradient_fd(H, lambda p: f0_value(probe, p), z, h).comps
    x0z = transport_field(probe, z).comps
    gap = float(np.linalg.norm(grad - x0z))
    ok = _close(grad, GRAD_F0_AT_Z, tols["ii"]) and _close(grad_fd, GRAD_F0_AT_Z, tols["ii-fd"]) and _close(x0z, X0_AT_Z, tols["ii"]) and gap > 1e-3
    out.append(
        Assertion(
            "ii",
            "grad f0 differs from X0 at z = (2, 1)",
            {"grad_f0": grad.tolist(), "grad_f0_fd": grad_fd.tolist(), "X0": x0z.tolist(), "difference": gap},
            {"grad_f0": list(GRAD_F0_AT_Z), "X0": list(X0_AT_Z)},
            tols["ii"],
            ok,
        )
    )

    e1 = H.tangent(z, [1.0, 0.0])
    cov_fd = covariant_derivative_fd(H, lambda p: transport_field(probe, p), z, e1, h).comps
    cov_an = hp.connection_apply(X0_HALFPLANE, (1.0, 0.0), z).comps
    ok = _close(cov_fd, COVARIANT_DERIVATIVE_AT_Z, tols["iii"])
    out.append(
        Assertion(
            "iii",
            "the covariant derivative of X0 along d/dt1 at z is nonzero",
            {"finite_difference": cov_fd.tolist(), "connection_formula": cov_an.tolist(), "step": h},
            {"value": list(COVARIANT_DERIVATIVE_AT_Z)},
            tols["iii"],
            ok,
        )
    )

    curl = hp.curl_oneform(X0_HALFPLANE, z)
    out.append(
        Assertion(
            "iv",
            "X0 is not a gradient field: its dual one-form has nonzero exterior derivative at z",
            {"curl": curl},
            {"curl": CURL_AT_Z},
            tols["iv"],
            _close(curl, CURL_AT_Z, tols["iv"]),
        )
    )
    return CounterexampleReport(out)
