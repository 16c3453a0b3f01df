import json
import math
from pathlib import Path

import numpy as np
import pytest

from geoaffine.affine import (
    F0_AT_CHORD_END,
    F0_AT_CHORD_MID,
    AffineProbe,
    Verdict,
    affine_expansion_point,
    characterization_checks,
    check_affine_formula,
    check_gradient_field,
    check_transport_commutation,
    counterexample_suite,
    f0_batch,
    f0_closed_form_hp,
    f0_value,
    gradient_fd,
    hessian_probe,
    transport_field,
    x0_closed_form_hp,
)
from geoaffine.errors import InvalidProbe, StepTooSmall
from geoaffine.manifold import SpaceSpec, distance, exp_map, norm, tangent_basis
from geoaffine.sampling import ball_points

ORACLE = json.loads(Path(__file__).with_name("frozen_oracles.json").read_text())
H = SpaceSpec.halfplane()
E2 = SpaceSpec.euclidean(2)
S2 = SpaceSpec.sphere(2, 1.0)
STD = AffineProbe.standard_halfplane()

ALL_SPACES = [E2, SpaceSpec.euclidean(5), S2, SpaceSpec.sphere(3, 2.0), SpaceSpec.hyperbolic(2), SpaceSpec.hyperbolic(3, -4.0), H]


def hp_points(n, seed):
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(-3, 3, n), rng.uniform(0.05, 4, n)])


# --- probes and f0 ---------------------------------------------------------------


def test_probe_rejects_zero_direction():
    x0 = H.point([0.0, 1.0])
    with pytest.raises(InvalidProbe):
        AffineProbe(H, x0, H.tangent(x0, [0.0, 0.0]))


def test_probe_rejects_foreign_base():
    with pytest.raises(InvalidProbe):
        AffineProbe(H, H.point([0.0, 1.0]), H.tangent(H.point([1.0, 1.0]), [0.0, 1.0]))


def test_standard_probe():
    assert STD.is_standard_halfplane and STD.u0_norm == 1.0
    assert not AffineProbe.canonical(H, 2.0).is_standard_halfplane


def test_f0_examples():
    assert f0_value(STD, H.point([0.0, math.e])) == pytest.approx(1.0, abs=1e-15)
    assert f0_value(STD, H.point([0.5, 0.5])) == pytest.approx(F0_AT_CHORD_END, abs=1e-12)
    assert f0_value(STD, H.point([0.5, 0.5])) == pytest.approx(ORACLE["f0_at_half"], abs=1e-10)
    assert f0_value(STD, H.point([0.0, 1 / math.sqrt(2)])) == pytest.approx(F0_AT_CHORD_MID, abs=1e-15)
    assert f0_value(STD, H.point([2.0, 1.0])) == pytest.approx(ORACLE["f0_at_z"], abs=1e-10)
    E = AffineProbe(E2, E2.point([1.0, 1.0]), E2.tangent(E2.point([1.0, 1.0]), [2.0, -1.0]))
    assert f0_value(E, E2.point([3.0, 0.0])) == pytest.approx(5.0)


def test_f0_is_infinite_beyond_half_diameter():
    p = AffineProbe.canonical(S2)
    north = S2.origin()
    far = exp_map(S2, north, tangent_basis(S2, north)[1] * 2.0)
    assert math.isinf(f0_value(p, far))


def test_f0_batch_matches_scalar():
    for space in ALL_SPACES:
        p = AffineProbe.canonical(space, 1.3)
        pts = ball_points(space, p.x0, 0.8, 30, np.random.default_rng(3))
        ref = [f0_value(p, space.point(q)) for q in pts]
        assert np.allclose(f0_batch(p, pts), ref, atol=1e-12)


def test_f0_closed_form_examples():
    assert f0_closed_form_hp((2.0, 1.0)) == pytest.approx(math.sqrt(2) * math.log(1 + math.sqrt(2)), abs=1e-12)
    assert f0_closed_form_hp((0.0, math.e**2)) == pytest.approx(2.0, abs=1e-14)


def test_f0_closed_form_agrees_with_core():
    for t in hp_points(1000, 17):
        assert abs(f0_closed_form_hp(t) - f0_value(STD, H.point(t))) < 1e-10


def test_f0_along_axis_is_linear():
    # along the geodesic through x0 in the direction u0, f0 grows at unit rate
    for space in ALL_SPACES:
        p = AffineProbe.canonical(space, 0.7)
        e = p.u0 * (1.0 / p.u0_norm)
        for t in (-1.0, 0.3, 1.2):
            if space.kappa > 0 and abs(t) >= space.diameter_bound / 2:
                continue
            assert f0_value(p, exp_map(space, p.x0, e * t)) == pytest.approx(t * p.u0_norm, abs=1e-12)


# --- the transported field ---------------------------------------------------------


def test_transport_field_examples():
    assert np.allclose(transport_field(STD, H.point([0.5, 0.5])).comps, [0.3, 0.4], atol=1e-14)
    assert np.allclose(transport_field(STD, H.point([2.0, 1.0])).comps, ORACLE["hp_transport_u0_to_z"], atol=1e-10)
    assert np.array_equal(transport_field(STD, STD.x0).comps, STD.u0.comps)
    E = AffineProbe.canonical(E2)
    assert np.allclose(transport_field(E, E2.point([5.0, -3.0])).comps, E.u0.comps)


def test_x0_closed_form_matches_transport_field():
    for t in hp_points(200, 4):
        assert np.allclose(x0_closed_form_hp(t), transport_field(STD, H.point(t)).comps, atol=1e-10)


def test_transport_field_preserves_norm():
    for space in ALL_SPACES:
        p = AffineProbe.canonical(space, 0.9)
        for q in ball_points(space, p.x0, 1.0, 20, np.random.default_rng(5)):
            assert norm(space, transport_field(p, space.point(q))) == pytest.approx(0.9, rel=1e-10)


# --- gradients --------------------------------------------------------------------


@pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: f"{s.kind.value}{s.dim}")
def test_gradient_of_f0_at_x0_is_u0(space):
    p = AffineProbe.canonical(space, 1.7)
    assert norm(space, gradient_fd(space, lambda y: f0_value(p, y), p.x0) - p.u0) < 1e-7


def test_gradient_fd_step_guard():
    with pytest.raises(StepTooSmall):
        gradient_fd(H, lambda y: 0.0, STD.x0, h=1e-13)


def test_gradient_fd_matches_closed_form_partials():
    z = H.point([2.0, 1.0])
    g = gradient_fd(H, lambda y: f0_value(STD, y), z).comps
    assert np.allclose(g, ORACLE["f0_partials_at_z"], atol=1e-8)


# --- characterization checks ------------------------------------------------------------


def test_commutation_examples():
    e = check_transport_commutation(AffineProbe.canonical(E2))
    assert e.verdict is Verdict.HOLDS and e.max_residual < 1e-12
    assert check_transport_commutation(STD).verdict is Verdict.VIOLATED
    assert check_transport_commutation(AffineProbe.canonical(S2)).verdict is Verdict.VIOLATED


@pytest.mark.parametrize("space", [S2, H, SpaceSpec.hyperbolic(2)], ids=["sphere", "halfplane", "hyperboloid"])
@pytest.mark.parametrize("length", [0.1, 1.0, 2.5])
def test_commutation_violated_for_generic_probes(space, length):
    r = check_transport_commutation(AffineProbe.canonical(space, length), n=100)
    assert r.verdict is Verdict.VIOLATED


def test_gradient_field_examples():
    assert check_gradient_field(AffineProbe.canonical(E2)).verdict is Verdict.HOLDS
    z = H.point([2.0, 1.0])
    r = check_gradient_field(STD, n=0, include=[z])
    assert r.verdict is Verdict.VIOLATED
    assert r.max_residual == pytest.approx(math.hypot(ORACLE["f0_partials_at_z"][0] - 1.0, ORACLE["f0_partials_at_z"][1]), abs=1e-8)
    closed = check_gradient_field(STD, n=0, include=[z], route="closed-form")
    assert closed.max_residual == pytest.approx(r.max_residual, abs=1e-8)
    at_x0 = check_gradient_field(STD, n=0, include=[STD.x0])
    assert at_x0.max_residual < 1e-10 and at_x0.verdict is Verdict.HOLDS


def test_affine_formula_examples():
    a = np.array([0.3, -2.0])
    f = lambda y: float(a @ y.coords) + 4.0  # noqa: E731
    r = check_affine_formula(E2, f, E2.point([1.0, 2.0]))
    assert r.verdict is Verdict.HOLDS and r.max_residual < 1e-10
    fH = lambda y: f0_value(STD, y)  # noqa: E731
    assert check_affine_formula(H, fH, H.point([2.0, 1.0])).verdict is Verdict.VIOLATED
    const = check_affine_formula(S2, lambda y: 3.0, S2.origin())
    assert const.verdict is Verdict.HOLDS and const.max_residual == 0.0
    assert any("zero" in n for n in const.notes)


def test_affine_formula_at_x0_is_trivial():
    # expanding f0 around its own base point reproduces it exactly
    r = check_affine_formula(H, lambda y: f0_value(STD, y), STD.x0)
    assert r.max_residual < 1e-9


def test_characterization_checks_verdicts():
    rng = np.random.default_rng(2)
    for d in (2, 5):
        E = SpaceSpec.euclidean(d)
        x0 = E.point(rng.normal(size=d))
        p = AffineProbe(E, x0, E.tangent(x0, rng.normal(size=d)))
        assert all(r.verdict is Verdict.HOLDS for r in characterization_checks(p, n=100))
    for p in (STD, AffineProbe.canonical(S2)):
        assert all(r.verdict is Verdict.VIOLATED for r in characterization_checks(p, n=200))


def test_expansion_point_is_off_base():
    for space in ALL_SPACES:
        p = AffineProbe.canonical(space)
        assert distance(space, p.x0, affine_expansion_point(p)) == pytest.approx(0.5, abs=1e-12)


def test_check_report_serializes():
    r = check_transport_commutation(STD, n=5)
    d = r.to_dict()
    assert d["verdict"] == "Violated" and d["n"] == 5 and len(d["worst_sample"]) == 2
    json.dumps(d)


# --- Hessian probe ---------------------------------------------------------------------


def test_hessian_of_affine_function_vanishes():
    rng = np.random.default_rng(8)
    for _ in range(100):
        a, beta = rng.normal(size=2), rng.normal()
        x = E2.point(rng.normal(size=2) * 3)
        v = E2.tangent(x, rng.normal(size=2))
        val = hessian_probe(E2, lambda y: float(a @ y.coords) + beta, x, v)
        assert abs(val) < 1e-7


def test_hessian_of_f0_on_euclidean_vanishes():
    p = AffineProbe.canonical(SpaceSpec.euclidean(3), 2.0)
    rng = np.random.default_rng(9)
    E3 = p.space
    for _ in range(20):
        x = E3.point(rng.normal(size=3))
        assert abs(hessian_probe(E3, lambda y: f0_value(p, y), x, E3.tangent(x, rng.normal(size=3)))) < 1e-7


def test_hessian_of_f0_at_z():
    z = H.point([2.0, 1.0])
    val = hessian_probe(H, lambda y: f0_value(STD, y), z, H.tangent(z, [1.0, 0.0]))
    assert abs(val) > 1e-3
    assert val == pytest.approx(ORACLE["f0_hessian_z_e1"], abs=1e-6)


@pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: f"{s.kind.value}{s.dim}")
def test_hessian_of_half_squared_distance(space):
    x0 = space.origin()
    f = lambda y: 0.5 * distance(space, x0, y) ** 2  # noqa: E731
    for e in tangent_basis(space, x0):
        assert hessian_probe(space, f, x0, e) == pytest.approx(1.0, abs=1e-6)


def test_hessian_step_guard():
    with pytest.raises(StepTooSmall):
        hessian_probe(H, lambda y: 0.0, STD.x0, STD.u0, h=0.0)


# --- counterexample ------------------------------------------------------------------------


def test_counterexample_suite_passes():
    r = counterexample_suite()
    assert [a.key for a in r.assertions] == ["i", "ii", "iii", "iv"]
    assert r.all_passed
    i = r.assertions[0].computed
    assert i["f0_x"] < -0.4 < i["f0_midpoint"]


def test_counterexample_tight_tolerance_fails_numeric_routes():
    r = counterexample_suite(tol=1e-15)
    passed = {a.key: a.passed for a in r.assertions}
    assert not passed["iii"]
