"""
Sample Surfaces Module

Factories for the surface families used by the verification suites and
the tests: planes, constant-radius surfaces, straight profiles, random
polynomial profiles and ODE-generated profiles.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from curves import ELLIPTIC, HYPERBOLIC, check_kind, make_profile, make_spherical
from errors import DomainError
from ode_solvers import (DEFAULT_ODE_STEP, profile_from_solution, solve_case,
                         solve_constant_product)
from surface import MeridianSurface, make_surface

DEFAULT_U_DOMAIN = (0.0, 1.0)
DEFAULT_V_DOMAIN = (0.0, 1.0)
LINEAR_SLOPE_TOL = 1e-12


def base_curve(kind: str, kappa, v_domain=DEFAULT_V_DOMAIN, initial_frame=None, step: float = 1e-3):
    return make_spherical(kind, kappa, initial_frame=initial_frame, v_domain=v_domain, step=step)


def linear_slope_angle(kind: str, a: float, b: float) -> float:
    """
    Constant slope angle of f = a u + a1, g = b u + b1.

    Raises:
        DomainError: If (a, b) is not a unit vector for the kind
            (a^2 - b^2 = 1 with a > 0 elliptic, a^2 + b^2 = 1 hyperbolic)
    """
    if check_kind(kind) == ELLIPTIC:
        if abs(a * a - b * b - 1.0) > LINEAR_SLOPE_TOL or a <= 0:
            raise DomainError(f"elliptic linear profile needs a^2 - b^2 = 1 and a > 0, got a={a}, b={b}")
        return float(np.arcsinh(b))
    if abs(a * a + b * b - 1.0) > LINEAR_SLOPE_TOL:
        raise DomainError(f"hyperbolic linear profile needs a^2 + b^2 = 1, got a={a}, b={b}")
    return float(np.arctan2(b, a))


def linear_surface(kind: str, a: float, a1: float, b: float, b1: float, kappa,
                   u_domain=DEFAULT_U_DOMAIN, v_domain=DEFAULT_V_DOMAIN) -> MeridianSurface:
    """Straight profile f = a u + a1, g = b u + b1 over a base curve of curvature kappa."""
    phi = linear_slope_angle(kind, a, b)
    u0 = float(u_domain[0])
    profile = make_profile(kind, [phi], f0=a * u0 + a1, g0=b * u0 + b1, u_domain=u_domain)
    return make_surface(profile, base_curve(kind, kappa, v_domain))


def plane(f0: float = 1.0, g0: float = 0.0, u_domain=DEFAULT_U_DOMAIN,
          v_domain=DEFAULT_V_DOMAIN) -> MeridianSurface:
    """Elliptic surface with kappa = 0, g' = 0, kappa_m = 0: a piece of a plane."""
    return linear_surface(ELLIPTIC, 1.0, f0 - u_domain[0], 0.0, g0, 0.0, u_domain, v_domain)


def radial_line(kappa: float, offset: float = 1.0, u_domain=(0.5, 1.5),
                v_domain=DEFAULT_V_DOMAIN) -> MeridianSurface:
    """Elliptic profile f = u + offset, g = 0."""
    return linear_surface(ELLIPTIC, 1.0, offset, 0.0, 0.0, kappa, u_domain, v_domain)


def constant_radius(a: float, g_slope: float, b: float, kappa,
                    u_domain=DEFAULT_U_DOMAIN, v_domain=DEFAULT_V_DOMAIN) -> MeridianSurface:
    """Hyperbolic profile f = a, g = g_slope u + b with g_slope = +1 or -1."""
    if g_slope not in (1, -1):
        raise DomainError(f"g_slope must be +1 or -1, got {g_slope}")
    if a <= 0:
        raise DomainError(f"radius must be positive, got {a}")
    return linear_surface(HYPERBOLIC, 0.0, a, float(g_slope), b, kappa, u_domain, v_domain)


def polynomial_surface(kind: str, coeffs: Sequence[float], f0: float, g0: float, kappa,
                       u_domain=DEFAULT_U_DOMAIN, v_domain=DEFAULT_V_DOMAIN,
                       u0: Optional[float] = None) -> MeridianSurface:
    profile = make_profile(kind, list(coeffs), f0=f0, g0=g0, u_domain=u_domain, u0=u0)
    return make_surface(profile, base_curve(kind, kappa, v_domain))


def random_polynomial_surface(rng: np.random.Generator, kind: str, max_degree: int = 3,
                              kappa: Optional[float] = None) -> Tuple[MeridianSurface, dict]:
    """
    Random polynomial slope angle (coefficients in [-0.5, 0.5]), f0 in
    [1.5, 3] and constant kappa in [-3, 3].

    Returns:
        (surface, parameters used)
    """
    degree = int(rng.integers(0, max_degree + 1))
    coeffs = rng.uniform(-0.5, 0.5, degree + 1).tolist()
    f0 = float(rng.uniform(1.5, 3.0))
    k = float(rng.uniform(-3.0, 3.0)) if kappa is None else float(kappa)
    params = {"kind": kind, "coeffs": coeffs, "f0": f0, "kappa": k}
    return polynomial_surface(kind, coeffs, f0, 0.0, k), params


def ode_surface(case: str, params: Optional[dict] = None, kappa=0.0,
                u_span=DEFAULT_U_DOMAIN, step: float = DEFAULT_ODE_STEP,
                v_domain=DEFAULT_V_DOMAIN) -> MeridianSurface:
    """Surface whose profile solves one of the ODE cases."""
    sol = solve_case(case, params or {}, u_span=u_span, step=step)
    profile = profile_from_solution(sol)
    return make_surface(profile, base_curve(profile.kind, kappa, v_domain))


def product_surface(kind: str, f0: float, phi0: float, a: float, kappa: float,
                    u_span=DEFAULT_U_DOMAIN, step: float = DEFAULT_ODE_STEP,
                    v_domain=DEFAULT_V_DOMAIN) -> MeridianSurface:
    """Profile with f kappa_m = a over a base curve of constant curvature kappa."""
    sol = solve_constant_product(kind, f0, phi0, a, u_span=u_span, step=step)
    profile = profile_from_solution(sol)
    return make_surface(profile, base_curve(kind, kappa, v_domain))
