import math
from dataclasses import replace

import numpy as np
import pytest

from warpaudit import linalg_core as la
from warpaudit import warp_geom as wg

MODELS = wg.builtin_models()
CONE = MODELS["chen-cone"]
CIRCLE = MODELS["circle-fiber"]
FLAT = MODELS["flat-product"]
CONE_POINT = (1.0, 0.0, 0.0, math.pi / 4)


def test_ambient_structure():
    amb = wg.AmbientCosymplectic(m=2)
    assert amb.dim == 5
    assert amb.structure_residual() == 0.0
    np.testing.assert_array_equal(amb.phi(amb.reeb), 0)
    np.testing.assert_array_equal(amb.phi([1.0, 0, 0, 0, 0]), [0, 1, 0, 0, 0])
    np.testing.assert_array_equal(amb.phi([0, 1.0, 0, 0, 0]), [-1, 0, 0, 0, 0])


def test_catalog_shapes():
    assert set(MODELS) >= {"flat-product", "chen-cone", "circle-fiber"}
    assert (CONE.n1, CONE.n2, CONE.ambient.m) == (3, 1, 2)
    with pytest.raises(wg.GeometryError, match="catalog"):
        wg.get_model("sphere")


def test_model_validation():
    with pytest.raises(wg.GeometryError):
        replace(FLAT, n2=0)
    with pytest.raises(wg.GeometryError):
        replace(FLAT, bounds=FLAT.bounds[:3])
    with pytest.raises(wg.GeometryError):
        replace(FLAT, xi_index=3)


def test_grid_is_cell_centred_and_interior():
    pts = CONE.grid(2)
    assert len(pts) == 16
    np.testing.assert_allclose(pts[0], [0.875, -0.25, -0.5, 0.475])
    assert len(CONE.grid([1, 1, 1, 3])) == 3
    with pytest.raises(wg.GeometryError):
        CONE.grid([2, 2])


def test_flat_frame_is_standard_basis():
    _, frame = wg.tangent_frame(FLAT, (0.1, -0.2, 0.3, 0.4))
    np.testing.assert_allclose(np.abs(frame), np.eye(5)[:, [0, 1, 4, 2]], atol=1e-12)


def test_chen_cone_jacobian_matches_analytic():
    jac, frame = wg.tangent_frame(CONE, CONE_POINT)
    s = math.sqrt(2) / 2
    np.testing.assert_allclose(jac[:, 3], [-s, 0, s, 0, 0], atol=1e-9)
    np.testing.assert_allclose(jac[:, 0], [s, 0, s, 0, 0], atol=1e-9)
    np.testing.assert_allclose(frame.T @ frame, np.eye(4), atol=1e-9)


def test_tangent_frame_errors():
    with pytest.raises(wg.GeometryError, match="interior"):
        wg.tangent_frame(CONE, (2.0, 0.0, 0.0, 0.5))
    pinched = replace(FLAT, immersion=lambda u: np.array([u[0], u[0], u[3], 0.0, u[2]]))
    with pytest.raises(wg.DegenerateImmersion, match="degenerate immersion point"):
        wg.tangent_frame(pinched, (0.0, 0.0, 0.0, 0.0))


def test_flat_second_fundamental_form_vanishes():
    geo = wg.second_fundamental_form(FLAT, (0.2, 0.1, -0.3, 0.5))
    assert geo.h_sq < 1e-16


@pytest.mark.parametrize("p", [(0.0, 0.0, 0.0, 0.7), (0.4, -0.5, 0.2, 2.1)])
def test_circle_fiber_h_sq_is_one(p):
    assert wg.second_fundamental_form(CIRCLE, p).h_sq == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("p", [CONE_POINT, (1.5, 0.3, 0.2, 0.5), (0.7, -0.4, 0.0, 1.1)])
def test_chen_cone_h_sq_is_two_over_r_squared(p):
    r2 = p[0] ** 2 + p[1] ** 2
    geo = wg.second_fundamental_form(CONE, p)
    assert geo.h_sq == pytest.approx(2.0 / r2, rel=1e-7)
    # the only nonzero component pairs the y direction with the fiber
    frame_norms = np.linalg.norm(geo.h, axis=2)
    assert frame_norms[:3, :3].max() < 1e-6


def test_second_fundamental_form_invariants():
    for model in MODELS.values():
        for p in model.grid(2):
            geo = wg.second_fundamental_form(model, p)
            assert np.abs(np.einsum("rsk,kt->rst", geo.h, geo.tangent_frame)).max() < 1e-8
            assert np.abs(geo.h - geo.h.transpose(1, 0, 2)).max() < 1e-8


@pytest.mark.parametrize("name", sorted(MODELS))
def test_halving_fd2_is_converged(name):
    model = MODELS[name]
    fine = wg.GeometrySettings(fd2=0.5e-4)
    for p in model.grid(2):
        a = wg.second_fundamental_form(model, p).h_sq
        b = wg.second_fundamental_form(model, p, fine).h_sq
        assert abs(a - b) <= 1e-6 * max(abs(a), 1.0)


def test_warping_terms_examples():
    assert wg.warping_terms(FLAT, (0.0, 0.0, 0.0, 0.0)) == (0.0, 0.0)
    g, lap = wg.warping_terms(CONE, (1.0, 0.0, 0.0, 0.5))
    assert g == pytest.approx(1.0, abs=1e-9)
    assert abs(lap) < 1e-7
    g, _ = wg.warping_terms(CONE, (1.9, 0.0, 0.0, 0.5))
    assert g == pytest.approx(1 / 1.9**2, abs=1e-9)


def test_warping_terms_nonflat_laplacian():
    # f = exp(x^2): ln f = x^2, Laplacian 2, gradient 4x^2 in flat coordinates
    model = replace(FLAT, warping_f=lambda q: math.exp(q[0] ** 2))
    g, lap = wg.warping_terms(model, (0.5, 0.0, 0.0, 0.0))
    assert g == pytest.approx(1.0, abs=1e-8)
    assert lap == pytest.approx(2.0, abs=1e-6)
    _, neg = wg.warping_terms(model, (0.5, 0.0, 0.0, 0.0), wg.GeometrySettings(laplacian_sign="negative"))
    assert neg == pytest.approx(-lap)


def test_warping_function_must_be_positive():
    model = replace(FLAT, warping_f=lambda q: q[0])
    with pytest.raises(wg.GeometryError, match="positive"):
        wg.warping_terms(model, (0.0, 0.0, 0.0, 0.0))


def test_settings_validation():
    with pytest.raises(ValueError):
        wg.GeometrySettings(laplacian_sign="positive")


def test_theorem_rhs_formula():
    assert wg.theorem_rhs(3, 1, 1.0, 0.0) == 2.0
    assert wg.theorem_rhs(3, 2, 0.5, 0.25, c_c=4.0) == pytest.approx(2 * 2 * (0.25 + 2.0))


def test_cr_structure_on_catalog():
    for name, model in MODELS.items():
        res = wg.check_cr_structure(model, model.grid(3))
        assert max(res.values()) < 1e-7, (name, res)
    flat = wg.check_cr_structure(FLAT, FLAT.grid(2))
    assert max(flat.values()) < 1e-10


def test_negative_control_is_flagged():
    model = wg.holomorphic_fiber_model()
    res = wg.check_cr_structure(model, model.grid(2))
    assert res["dperp_antiinvariance_residual"] == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(wg.ModelInvariantError) as info:
        wg.check_warping_bound(model, model.grid(1))
    # phi(d/dx) is the fiber direction, so D_T invariance is the first to break
    assert info.value.invariant == "dt_invariance_residual"
    assert info.value.residual == pytest.approx(1.0, abs=1e-6)


def test_theorem_verdicts():
    flat = wg.check_warping_bound(FLAT, FLAT.grid(3))
    assert flat.verdict == "equality" and flat.max_abs_margin < 1e-6
    circle = wg.check_warping_bound(CIRCLE, CIRCLE.grid(2))
    assert circle.verdict == "strict"
    assert all(r.margin == pytest.approx(1.0, abs=1e-6) for r in circle.records)
    assert circle.diagnostics == {}


def test_chen_cone_equality_with_both_sides_two_over_r_squared():
    v = wg.check_warping_bound(CONE, CONE.grid(3))
    assert v.verdict == "equality" and v.equality
    for r in v.records:
        expected = 2.0 / (r.point[0] ** 2 + r.point[1] ** 2)
        assert r.h_sq == pytest.approx(expected, abs=1e-6)
        assert r.rhs == pytest.approx(expected, abs=1e-6)
    assert max(v.diagnostics.values()) < 1e-6


def test_negative_laplacian_sign_breaks_nothing_on_harmonic_warping():
    settings = wg.GeometrySettings(laplacian_sign="negative")
    assert wg.check_warping_bound(CONE, CONE.grid(2), settings).verdict == "equality"


def test_dt_minimality_and_xi_relations():
    for model in MODELS.values():
        pts = model.grid(2)
        assert wg.check_dt_minimality(model, pts) < 1e-6
        assert wg.check_xi_relations(model, pts)["h_xi_xi_max"] < 1e-8


def test_shape_operator_flat_is_zero():
    geo = wg.second_fundamental_form(FLAT, (0.0, 0.0, 0.0, 0.0))
    zeta = wg.normal_basis(geo)[:, 0]
    op = wg.shape_operator(FLAT, None, zeta, geo=geo)
    assert np.abs(op.matrix).max() < 1e-10
    assert op.reduced.shape == (3, 3)


def test_shape_operator_circle_fiber():
    t = 0.9
    p = (0.0, 0.0, 0.0, t)
    inward = np.array([0.0, 0.0, -math.cos(t), -math.sin(t), 0.0])
    op = wg.shape_operator(CIRCLE, p, inward)
    expected = np.zeros((4, 4))
    expected[3, 3] = 1.0
    np.testing.assert_allclose(op.matrix, expected, atol=1e-7)
    np.testing.assert_allclose(la.svals(op.reduced), [1, 0, 0], atol=1e-7)


def test_shape_operator_feeds_singular_values():
    p = (1.2, 0.3, 0.1, 0.6)
    geo = wg.second_fundamental_form(CONE, p)
    for zeta in wg.normal_basis(geo).T:
        op = wg.shape_operator(CONE, p, zeta, geo=geo)
        assert np.abs(op.matrix - op.matrix.T).max() < 1e-9
        assembled = np.einsum("rsk,k->rs", geo.h, zeta)
        np.testing.assert_allclose(la.svals(op.matrix), np.linalg.svd(assembled, compute_uv=False), atol=1e-9)


def test_shape_operator_rejects_bad_zeta():
    geo = wg.second_fundamental_form(CIRCLE, (0.0, 0.0, 0.0, 1.0))
    with pytest.raises(wg.GeometryError, match="unit"):
        wg.shape_operator(CIRCLE, None, np.array([0.0, 0, 2, 0, 0]), geo=geo)
    with pytest.raises(wg.GeometryError, match="tangential residual"):
        wg.shape_operator(CIRCLE, None, np.array([1.0, 0, 0, 0, 0]), geo=geo)
