"""Tests for meridian surfaces, their frames and curvature vectors."""

import numpy as np
import pytest

from curves import ELLIPTIC, HYPERBOLIC, make_profile, make_spherical
from errors import DomainError
from minkowski_algebra import (SIGNATURE, inner4, inner4_array, inner_biv, inner_biv_array,
                               random_isometry)
from sample_surfaces import constant_radius, plane, polynomial_surface
from surface import (first_fundamental_form, frame, gauss_map, immersion, make_grid, make_surface,
                     mean_curvature_vector, metric_coefficient, normal_frame_rotation, sample_points)

KINDS = [ELLIPTIC, HYPERBOLIC]


@pytest.fixture(params=KINDS)
def curved(request):
    return polynomial_surface(request.param, [0.3, -0.4, 0.5], 2.0, 0.0, [1.2, 0.5])


def test_frame_gram_is_minkowski(curved):
    for u, v in [(0.2, 0.3), (0.7, 0.9), (0.5, 0.05)]:
        np.testing.assert_allclose(frame(curved, u, v).gram(), np.diag(SIGNATURE), atol=1e-10)


def test_frame_matches_parametrisation(curved):
    u, v, h = 0.4, 0.6, 1e-5
    fr = frame(curved, u, v)
    z_u = (curved.immersion_array(u + h, v) - curved.immersion_array(u - h, v)) / (2 * h)
    z_v = (curved.immersion_array(u, v + h) - curved.immersion_array(u, v - h)) / (2 * h)
    f = curved.profile.f(u)
    np.testing.assert_allclose(z_u, fr.x.to_array(), atol=1e-8)
    np.testing.assert_allclose(z_v / f, fr.y.to_array(), atol=1e-8)


def test_first_fundamental_form(curved):
    E, F, G = first_fundamental_form(curved, 0.3, 0.4)
    assert E == pytest.approx(1.0, abs=1e-10)
    assert F == pytest.approx(0.0, abs=1e-10)
    assert G == pytest.approx(metric_coefficient(curved, 0.3), rel=1e-10)


def test_mean_curvature_is_half_trace_of_second_fundamental_form(curved):
    u, v, h = 0.5, 0.5, 1e-3
    z = curved.immersion_array
    z0 = z(u, v)
    z_uu = (z(u + h, v) - 2 * z0 + z(u - h, v)) / h ** 2
    z_vv = (z(u, v + h) - 2 * z0 + z(u, v - h)) / h ** 2
    f = curved.profile.f(u)
    trace = z_uu + z_vv / f ** 2
    fr = frame(curved, u, v)
    x, y = fr.x.to_array(), fr.y.to_array()
    normal_part = trace - inner4_array(trace, x) * x - inner4_array(trace, y) * y
    np.testing.assert_allclose(mean_curvature_vector(curved, u, v).to_array(), 0.5 * normal_part, atol=1e-5)


def test_gauss_map_is_unit_spacelike_plane(curved):
    G = gauss_map(curved, 0.3, 0.8)
    assert inner_biv(G, G) == pytest.approx(1.0, abs=1e-10)


def test_plane_has_constant_axis_coordinate():
    s = plane(f0=1.0, g0=0.25)
    pts = sample_points(s, make_grid(s, 10, 10))
    assert pts.shape == (100, 6)
    np.testing.assert_allclose(pts[:, 5], 0.25, atol=1e-12)
    radius = np.linalg.norm(pts[:, 2:5], axis=1)
    np.testing.assert_allclose(radius, 1.0 + pts[:, 0], atol=1e-12)


def test_hyperbolic_axis_slot_carries_g():
    s = constant_radius(1.5, -1, 0.3, 1.0)
    pts = sample_points(s, make_grid(s, 5, 4))
    np.testing.assert_allclose(pts[:, 2], 0.3 - pts[:, 0], atol=1e-12)
    # l on the de Sitter sphere: x2^2 + x3^2 - x4^2 = f^2
    q = pts[:, 3] ** 2 + pts[:, 4] ** 2 - pts[:, 5] ** 2
    np.testing.assert_allclose(q, 1.5 ** 2, atol=1e-9)


def test_rotated_normals(curved):
    n, n_perp = normal_frame_rotation(curved, 0.3, 0.3, 0.7)
    assert inner4(n, n) == pytest.approx(1.0, abs=1e-10)
    assert inner4(n_perp, n_perp) == pytest.approx(-1.0, abs=1e-10)
    assert inner4(n, n_perp) == pytest.approx(0.0, abs=1e-10)


def test_invariants_under_rigid_motion(curved):
    lorentz, shift = random_isometry(np.random.default_rng(3))
    moved = curved.moved(lorentz, shift)
    u, v = np.array([0.2, 0.6]), np.array([0.4, 0.8])
    np.testing.assert_allclose(moved.immersion_array(u, v),
                               curved.immersion_array(u, v) @ lorentz.T + shift, atol=1e-10)
    h0, h1 = curved.mean_curvature_array(u, v), moved.mean_curvature_array(u, v)
    np.testing.assert_allclose(inner4_array(h1, h1), inner4_array(h0, h0), atol=1e-9)
    lap0 = inner_biv_array(curved.laplacian_closed_array(u, v), curved.gauss_map_array(u, v))
    lap1 = inner_biv_array(moved.laplacian_closed_array(u, v), moved.gauss_map_array(u, v))
    np.testing.assert_allclose(lap1, lap0, atol=1e-8)


def test_motion_must_be_lorentz(curved):
    with pytest.raises(ValueError):
        curved.moved(np.diag([2.0, 1.0, 1.0, 1.0]))


def test_points_outside_domain(curved):
    with pytest.raises(DomainError):
        immersion(curved, 1.2, 0.5)
    with pytest.raises(DomainError):
        frame(curved, 0.5, -0.1)


def test_kinds_must_match():
    profile = make_profile(ELLIPTIC, 0.0, 1.0, 0.0, (0.0, 1.0))
    with pytest.raises(ValueError):
        make_surface(profile, make_spherical(HYPERBOLIC, 1.0))


def test_grid_construction(curved):
    grid = make_grid(curved, 7, 3, margin=0.1)
    assert grid.shape == (7, 3)
    uu, vv = grid.mesh()
    assert uu.shape == (7, 3)
    assert uu[0, 0] == pytest.approx(0.1) and vv[0, -1] == pytest.approx(0.9)
    with pytest.raises(ValueError):
        make_grid(curved, 5, 5, margin=0.6)
