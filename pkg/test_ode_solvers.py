"""Tests for the classifying profile ODE solvers."""

from dataclasses import replace

import numpy as np
import pytest

from curves import ELLIPTIC, HYPERBOLIC
from errors import BlowUp, ConstraintError, OdeError, SingularDenominator
from ode_solvers import (CASES, DEFAULT_PARAMS, FIRST_ELLIPTIC, FIRST_HYPERBOLIC, OdeSolution,
                         RegimeGuard, case_family, case_kind, first_integral_residual,
                         ode_residual, profile_from_solution, solve_case,
                         solve_constant_product, solve_first_kind, solve_second_kind)


@pytest.mark.parametrize("case", CASES)
def test_default_cases_solve_with_small_residual(case):
    sol = solve_case(case, {})
    assert sol.stop_reason == "completed"
    assert sol.u_span == pytest.approx((0.0, 1.0))
    assert sol.residual_max <= 1e-6
    assert sol.table().shape == (len(sol.u), 5)


def test_case_helpers():
    assert case_kind(FIRST_HYPERBOLIC) == HYPERBOLIC
    assert case_family("second_elliptic") == "second"
    with pytest.raises(ValueError):
        case_kind("third_elliptic")


@pytest.mark.parametrize("kind", [ELLIPTIC, HYPERBOLIC])
def test_first_kind_residual_converges(kind):
    params = DEFAULT_PARAMS[FIRST_ELLIPTIC if kind == ELLIPTIC else FIRST_HYPERBOLIC]
    coarse = solve_first_kind(kind, params["f0"], params["phi0"], params["p0"], step=0.04)
    fine = solve_first_kind(kind, params["f0"], params["phi0"], params["p0"], step=0.02)
    assert coarse.residual_max / fine.residual_max > 8.0


@pytest.mark.parametrize("kind", [ELLIPTIC, HYPERBOLIC])
def test_second_kind_residual_converges(kind):
    p = DEFAULT_PARAMS[f"second_{kind}"]
    args = (kind, p["f0"], p["df0"], p["d2f0"], p["c"])
    coarse = solve_second_kind(*args, step=0.04, check_reduction=False)
    fine = solve_second_kind(*args, step=0.02, check_reduction=False)
    assert coarse.residual_max / fine.residual_max > 8.0


@pytest.mark.parametrize("kind", [ELLIPTIC, HYPERBOLIC])
def test_second_kind_first_integral_holds(kind):
    p = DEFAULT_PARAMS[f"second_{kind}"]
    sol = solve_second_kind(kind, p["f0"], p["df0"], p["d2f0"], p["c"])
    assert first_integral_residual(sol) <= 1e-6
    assert sol.df[0] == pytest.approx(p["df0"], abs=1e-12)
    assert sol.d2f[0] == pytest.approx(p["d2f0"], abs=1e-12)


def test_perturbed_solution_is_detected():
    sol = solve_first_kind(ELLIPTIC, 1.0, 0.5, 0.2)
    bumped = replace(sol, p=1.01 * sol.p)
    expected = 0.01 * np.max(np.abs(sol.df * sol.dg)[2:-2])
    assert ode_residual(bumped) == pytest.approx(expected, rel=1e-3)


@pytest.mark.parametrize("phi0", [0.0, 0.4])
def test_straight_line_residual(phi0):
    u = np.linspace(0.0, 1.0, 101)
    line = OdeSolution(case=FIRST_ELLIPTIC, u=u, f=1.0 + np.cosh(phi0) * u,
                       phi=np.full_like(u, phi0), p=np.zeros_like(u), g=np.sinh(phi0) * u,
                       params={}, step=0.01)
    assert ode_residual(line) == pytest.approx(np.cosh(phi0) * abs(np.sinh(phi0)), abs=1e-12)


def test_constant_product_keeps_product():
    sol = solve_constant_product(ELLIPTIC, 1.0, 1.0, 0.7)
    np.testing.assert_allclose(sol.p, 0.7)
    assert sol.residual_max <= 1e-8


def test_zero_c_is_rejected():
    with pytest.raises(ConstraintError, match="c must be nonzero"):
        solve_second_kind(ELLIPTIC, 1.5, 1.2, 0.1, 0.0)


def test_singular_denominator_at_start():
    with pytest.raises(SingularDenominator):
        solve_second_kind(ELLIPTIC, 1.5, 1.25, 0.1, -0.8)


def test_branch_initial_data():
    with pytest.raises(ConstraintError):
        solve_second_kind(ELLIPTIC, 1.5, 0.9, 0.1, 0.5)
    with pytest.raises(ConstraintError):
        solve_second_kind(HYPERBOLIC, 1.5, 1.0, 0.1, 0.5)
    with pytest.raises(ConstraintError):
        solve_first_kind(ELLIPTIC, 1.0, 0.0, 0.2)


def test_slope_sign_change_stops_integration():
    with pytest.raises(ConstraintError) as info:
        solve_first_kind(HYPERBOLIC, 1.0, 0.05, -1.0)
    err = info.value
    assert 0.0 < err.u_stop < 0.1
    assert "stopped at u" in str(err)
    assert err.partial.u[-1] == pytest.approx(err.u_stop)
    assert np.all(np.sin(err.partial.phi) > 0)


def test_regime_guard():
    guard = RegimeGuard(kind=HYPERBOLIC, slope_sign=1.0)
    assert guard.check(np.array([1.0, 0.5, 0.0, 0.0])) is None
    assert guard.check(np.array([0.0, 0.5, 0.0, 0.0]))[0] is BlowUp
    assert guard.check(np.array([np.nan, 0.5, 0.0, 0.0]))[0] is BlowUp
    assert guard.check(np.array([1.0, -0.5, 0.0, 0.0]))[0] is ConstraintError
    den = RegimeGuard(kind=ELLIPTIC, slope_sign=1.0, c=-1.0)
    assert den.check(np.array([1.0, 1e-6, 0.0, 0.0]))[0] is SingularDenominator


def test_invalid_arguments():
    with pytest.raises(ValueError):
        solve_case(FIRST_ELLIPTIC, {"q": 1.0})
    with pytest.raises(ValueError):
        solve_first_kind(ELLIPTIC, 1.0, 0.5, 0.2, step=0.0)
    with pytest.raises(ValueError):
        solve_first_kind(ELLIPTIC, 1.0, 0.5, 0.2, u_span=(1.0, 0.0))
    assert issubclass(ConstraintError, OdeError)


def test_dense_output_profile():
    sol = solve_first_kind(ELLIPTIC, 1.0, 0.5, 0.2)
    profile = profile_from_solution(sol)
    np.testing.assert_allclose(profile.f(sol.u), sol.f, atol=1e-12)
    np.testing.assert_allclose(profile.kappa_m(sol.u), sol.p / sol.f, atol=1e-12)
    # first kind: (f kappa_m)' = f' g' / f
    u = np.linspace(0.1, 0.9, 9)
    np.testing.assert_allclose(profile.d_f_kappa_m(u),
                               profile.df(u) * profile.dg(u) / profile.f(u), atol=1e-9)
