"""Tests for profile curves and spherical base curves."""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from curves import (ELLIPTIC, HYPERBOLIC, frame_gram, frame_targets, gram_defect,
                    integrate_spherical, make_profile, make_spherical, profile_curvature)
from errors import DomainError, FrameError


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def test_constant_slope_angle_gives_straight_profile():
    c = 0.4
    p = make_profile(ELLIPTIC, c, f0=1.0, g0=0.5, u_domain=(0.0, 1.0))
    u = np.linspace(0, 1, 7)
    np.testing.assert_allclose(p.f(u), 1.0 + np.cosh(c) * u, atol=1e-12)
    np.testing.assert_allclose(p.g(u), 0.5 + np.sinh(c) * u, atol=1e-12)


def test_hyperbolic_constant_slope_angle():
    c = 0.7
    p = make_profile(HYPERBOLIC, [c], f0=2.0, g0=0.0, u_domain=(0.0, 1.0))
    np.testing.assert_allclose(p.f(0.8), 2.0 + np.cos(c) * 0.8, atol=1e-12)
    np.testing.assert_allclose(p.g(0.8), np.sin(c) * 0.8, atol=1e-12)


@pytest.mark.parametrize("kind", [ELLIPTIC, HYPERBOLIC])
def test_unit_speed_and_curvature_identity(kind):
    p = make_profile(kind, [0.2, 0.3, -0.4], f0=2.0, g0=0.0, u_domain=(0.0, 1.0))
    u = np.linspace(0, 1, 11)
    sign = 1.0 if kind == ELLIPTIC else -1.0
    np.testing.assert_allclose(p.df(u) ** 2 - sign * p.dg(u) ** 2, 1.0, atol=1e-12)
    kappa_m = p.df(u) * p.d2g(u) - p.dg(u) * p.d2f(u)
    np.testing.assert_allclose(kappa_m, 0.3 - 0.8 * u, atol=1e-12)
    np.testing.assert_allclose(profile_curvature(p, u), 0.3 - 0.8 * u, atol=1e-12)


def test_primitive_matches_finite_difference():
    p = make_profile(ELLIPTIC, [0.1, 0.5, 0.2], f0=1.5, g0=0.0, u_domain=(0.0, 1.0))
    h = 1e-4
    u = 0.37
    np.testing.assert_allclose((p.f(u + h) - p.f(u - h)) / (2 * h), p.df(u), atol=1e-8)
    np.testing.assert_allclose((p.g(u + h) - p.g(u - h)) / (2 * h), p.dg(u), atol=1e-8)


def test_f_kappa_m_derivative():
    p = make_profile(HYPERBOLIC, [0.3, 0.6], f0=2.0, g0=0.0, u_domain=(0.0, 1.0))
    h = 1e-4
    u = 0.5
    fd = (p.f(u + h) * p.kappa_m(u + h) - p.f(u - h) * p.kappa_m(u - h)) / (2 * h)
    assert p.d_f_kappa_m(u) == pytest.approx(fd, abs=1e-7)


def test_anchor_point():
    p = make_profile(ELLIPTIC, [0.0, 0.5], f0=1.0, g0=2.0, u_domain=(0.0, 1.0), u0=0.5)
    assert p.f(0.5) == pytest.approx(1.0, abs=1e-14)
    assert p.g(0.5) == pytest.approx(2.0, abs=1e-14)


def test_nonpositive_radius_is_rejected():
    with pytest.raises(DomainError):
        make_profile(HYPERBOLIC, np.pi, f0=0.5, g0=0.0, u_domain=(0.0, 1.0))


def test_callable_slope_angle_needs_derivatives():
    with pytest.raises(ValueError):
        make_profile(ELLIPTIC, lambda u: 0 * u, f0=1.0, g0=0.0, u_domain=(0.0, 1.0))


def test_callable_slope_angle_with_derivatives():
    p = make_profile(ELLIPTIC, np.sin, f0=1.0, g0=0.0, u_domain=(0.0, 1.0),
                     dphi=np.cos, d2phi=lambda u: -np.sin(u))
    assert p.kappa_m(0.3) == pytest.approx(np.cos(0.3))


def test_curvature_outside_domain():
    p = make_profile(ELLIPTIC, 0.0, f0=1.0, g0=0.0, u_domain=(0.0, 1.0))
    with pytest.raises(DomainError):
        profile_curvature(p, 1.5)


def test_vanishing_slope_detected():
    p = make_profile(ELLIPTIC, 0.0, f0=1.0, g0=0.0, u_domain=(0.0, 1.0))
    with pytest.raises(DomainError):
        p.require_nonzero_slope()
    make_profile(ELLIPTIC, 0.2, f0=1.0, g0=0.0, u_domain=(0.0, 1.0)).require_nonzero_slope()


def test_empty_domain_rejected():
    with pytest.raises(ValueError):
        make_profile(ELLIPTIC, 0.0, f0=1.0, g0=0.0, u_domain=(1.0, 1.0))


# ---------------------------------------------------------------------------
# spherical curves
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind", [ELLIPTIC, HYPERBOLIC])
def test_zero_curvature_is_a_great_circle(kind):
    c = integrate_spherical(make_spherical(kind, 0.0, v_domain=(0.0, 1.0)))
    l, t, n = c.frame(1.0)
    np.testing.assert_allclose(l, [np.cos(1.0), np.sin(1.0), 0.0], atol=1e-10)
    np.testing.assert_allclose(t, [-np.sin(1.0), np.cos(1.0), 0.0], atol=1e-10)
    np.testing.assert_allclose(n, [0.0, 0.0, 1.0], atol=1e-10)


@pytest.mark.parametrize("kind", [ELLIPTIC, HYPERBOLIC])
def test_frame_stays_orthonormal(kind):
    c = integrate_spherical(make_spherical(kind, [0.5, 0.3], v_domain=(0.0, 1.0)))
    assert gram_defect(c) < 1e-12
    l, t, n = c.frame(np.linspace(0.0, 1.0, 33))
    gram = frame_gram(kind, np.stack([l, t, n], axis=1))
    np.testing.assert_allclose(gram, np.broadcast_to(frame_targets(kind), gram.shape), atol=1e-10)


def test_gram_defect_converges_at_fourth_order():
    kappa = [0.5, 0.1]
    coarse = integrate_spherical(make_spherical(ELLIPTIC, kappa, v_domain=(0.0, 10.0), step=0.1))
    fine = integrate_spherical(make_spherical(ELLIPTIC, kappa, v_domain=(0.0, 10.0), step=0.05))
    assert gram_defect(coarse) / gram_defect(fine) > 10.0


def test_frenet_equations_hold_on_interpolant():
    kind = HYPERBOLIC
    c = integrate_spherical(make_spherical(kind, 2.0, v_domain=(0.0, 1.0)))
    v, h = 0.4, 1e-5
    lp, tp, np_ = c.frame(v + h)
    lm, tm, nm = c.frame(v - h)
    l, t, n = c.frame(v)
    np.testing.assert_allclose((lp - lm) / (2 * h), t, atol=1e-7)
    np.testing.assert_allclose((tp - tm) / (2 * h), -2.0 * n - l, atol=1e-7)
    np.testing.assert_allclose((np_ - nm) / (2 * h), -2.0 * t, atol=1e-7)


def test_interpolated_frame_matches_exact_rotation_between_samples():
    kappa = 0.5
    c = integrate_spherical(make_spherical(ELLIPTIC, kappa, v_domain=(0.0, 1.0)))
    v = np.linspace(0.0, 1.0, 1001)[:-1] + 0.5e-3
    # constant kappa: the frame rotates about the fixed axis kappa l0 + n0
    exact = Rotation.from_rotvec(np.outer(v, [kappa, 0.0, 1.0]))
    for got, axis in zip(c.frame(v), np.eye(3)):
        np.testing.assert_allclose(got, exact.apply(axis), atol=1e-10)


def test_frame_shape_follows_input():
    c = integrate_spherical(make_spherical(ELLIPTIC, 1.0))
    l, t, n = c.frame(np.array([[0.1, 0.2]]))
    assert l.shape == t.shape == n.shape == (1, 2, 3)


def test_frame_domain_and_integration_state():
    spec = make_spherical(ELLIPTIC, 1.0)
    with pytest.raises(ValueError):
        spec.frame(0.5)
    c = integrate_spherical(spec)
    with pytest.raises(DomainError):
        c.frame(1.5)


def test_bad_initial_frames():
    with pytest.raises(FrameError):
        make_spherical(ELLIPTIC, 1.0, initial_frame=[[1, 0, 0], [0, 1, 0]])
    with pytest.raises(FrameError):
        integrate_spherical(make_spherical(ELLIPTIC, 1.0, initial_frame=[[1, 0, 0], [1, 1, 0], [0, 0, 1]]))


def test_curvature_derivative_of_callable():
    c = integrate_spherical(make_spherical(ELLIPTIC, lambda v: 1.0 + v * v))
    assert c.dkappa_at(0.5) == pytest.approx(1.0, abs=1e-4)


def test_polynomial_curvature_derivative_is_exact():
    c = make_spherical(ELLIPTIC, [1.0, 0.5])
    assert c.dkappa_at(0.3) == pytest.approx(0.5)
    assert c.kappa_at(np.zeros(3)).shape == (3,)
