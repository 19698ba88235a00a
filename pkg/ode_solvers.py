"""
ODE Solvers Module

Fixed-step RK4 integration of the profile ODEs that produce meridian
surfaces with pointwise 1-type Gauss map, in the state (f, phi, p, g)
with p = f phi' = f kappa_m.

First kind (kappa = 0):
    elliptic:   f' = cosh(phi), phi' = p/f, p' = cosh(phi) sinh(phi) / f
    hyperbolic: f' = cos(phi),  phi' = p/f, p' = cos(phi) sin(phi) / f

Second kind (kappa = 0). The condition for a constant C reads
(ln phi_C)' = (f'/g') kappa_m = (ln g')', where phi_C is the y^n2
(elliptic) or y^n1 (hyperbolic) coefficient of C. Integrating once gives
the first integral phi_C = c g' with c != 0. Substituting the kappa = 0
lambda and solving for p' gives

    elliptic:   p' = g' (f' + c (1 - p^2)) / (f (1 + c f'))
    hyperbolic: p' = g' (f' - c (1 + p^2)) / (f (1 - c f'))

and then C = c l^t (elliptic) or -c l^t (hyperbolic). Every second-kind
run re-checks the literal third-order ODE in f along the solution, so a
sign slip in the reduction shows up as ReductionMismatch.

Constant product (f kappa_m = a): phi' = a / f, p = a. These profiles
are the candidates of the nonexistence subcase.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from curves import ELLIPTIC, HYPERBOLIC, ProfileCurve, check_kind, slope_functions
from errors import BlowUp, ConstraintError, ReductionMismatch, SingularDenominator

FIRST_ELLIPTIC = "first_elliptic"
FIRST_HYPERBOLIC = "first_hyperbolic"
SECOND_ELLIPTIC = "second_elliptic"
SECOND_HYPERBOLIC = "second_hyperbolic"
PRODUCT_ELLIPTIC = "product_elliptic"
PRODUCT_HYPERBOLIC = "product_hyperbolic"
CASES = (FIRST_ELLIPTIC, FIRST_HYPERBOLIC, SECOND_ELLIPTIC, SECOND_HYPERBOLIC,
         PRODUCT_ELLIPTIC, PRODUCT_HYPERBOLIC)

DEFAULT_ODE_STEP = 1e-3
DEFAULT_U_SPAN = (0.0, 1.0)
F_MIN = 1e-6
PHI_MAX = 50.0
BRANCH_TOL = 1e-9
DENOMINATOR_TOL = 1e-9
RESIDUAL_TOL = 1e-5
MISMATCH_FACTOR = 10.0
MIN_ODE_STEPS = 8

# parameters used by the CLI when a case is run without --param overrides
DEFAULT_PARAMS: Dict[str, Dict[str, float]] = {
    FIRST_ELLIPTIC: {"f0": 1.0, "phi0": 0.5, "p0": 0.2},
    FIRST_HYPERBOLIC: {"f0": 2.0, "phi0": 1.2, "p0": 0.1},
    SECOND_ELLIPTIC: {"f0": 1.5, "df0": 1.2, "d2f0": 0.1, "c": 0.5},
    SECOND_HYPERBOLIC: {"f0": 2.0, "df0": 0.4, "d2f0": 0.05, "c": 0.5},
    PRODUCT_ELLIPTIC: {"f0": 1.0, "phi0": 1.0, "a": 0.7},
    PRODUCT_HYPERBOLIC: {"f0": 2.0, "phi0": 1.0, "a": 0.4},
}


def case_kind(case: str) -> str:
    if case not in CASES:
        raise ValueError(f"unknown ODE case {case!r}; expected one of {CASES}")
    return ELLIPTIC if case.endswith(ELLIPTIC) else HYPERBOLIC


def case_family(case: str) -> str:
    """'first', 'second' or 'product'."""
    case_kind(case)
    return case.split("_")[0]


def rk4_step(rhs: Callable, u: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical Runge-Kutta step for y' = rhs(u, y)."""
    k1 = rhs(u, y)
    k2 = rhs(u + h / 2, y + h / 2 * k1)
    k3 = rhs(u + h / 2, y + h / 2 * k2)
    k4 = rhs(u + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def second_kind_denominator(kind: str, c: float, phi):
    """1 + c f' (elliptic) or 1 - c f' (hyperbolic)."""
    fp = slope_functions(kind)[0](phi)
    return 1.0 + c * fp if kind == ELLIPTIC else 1.0 - c * fp


def make_system(case: str, params: Dict[str, float]) -> Callable:
    """
    Right-hand side for the state y = (f, phi, p, g).

    Works on a single state of shape (4,) or on stacked states (4, N).
    """
    kind = case_kind(case)
    family = case_family(case)
    fp_of, gp_of = slope_functions(kind)
    c = params.get("c", 0.0)

    def rhs(u, y):
        f, phi, p = y[0], y[1], y[2]
        fp, gp = fp_of(phi), gp_of(phi)
        if family == "first":
            dp = fp * gp / f
        elif family == "second":
            if kind == ELLIPTIC:
                dp = gp * (fp + c * (1.0 - p * p)) / (f * (1.0 + c * fp))
            else:
                dp = gp * (fp - c * (1.0 + p * p)) / (f * (1.0 - c * fp))
        else:
            dp = np.zeros_like(f)
        return np.array([fp, p / f, dp, gp])

    return rhs


@dataclass(frozen=True)
class RegimeGuard:
    """
    Admissibility test run on every candidate state before it is accepted.

    slope_sign fixes the branch of g' (0 disables the check); c enables the
    second-kind denominator check.
    """

    kind: str
    slope_sign: float = 0.0
    c: Optional[float] = None
    denominator_sign: float = 1.0
    f_min: float = F_MIN
    phi_max: float = PHI_MAX
    branch_tol: float = BRANCH_TOL

    def check(self, y: np.ndarray) -> Optional[Tuple[type, str]]:
        if not np.all(np.isfinite(y)):
            return BlowUp, "state became non-finite"
        f, phi = y[0], y[1]
        if f <= self.f_min:
            return BlowUp, f"f dropped to {f:.3g} (f_min = {self.f_min:g})"
        if abs(phi) > self.phi_max:
            return BlowUp, f"|phi| exceeded {self.phi_max:g}"
        fp_of, gp_of = slope_functions(self.kind)
        if self.kind == HYPERBOLIC and abs(fp_of(phi)) >= 1.0 - self.branch_tol:
            return ConstraintError, "hyperbolic f' left the open interval (-1, 1)"
        if self.slope_sign and self.slope_sign * gp_of(phi) <= self.branch_tol:
            return ConstraintError, "g' reached zero (branch change)"
        if self.c is not None:
            den = second_kind_denominator(self.kind, self.c, phi)
            if self.denominator_sign * den <= DENOMINATOR_TOL:
                sign = "+" if self.kind == ELLIPTIC else "-"
                return SingularDenominator, f"1 {sign} c f' reached zero"
        return None


@dataclass(frozen=True, eq=False)
class OdeSolution:
    """Samples of an integrated profile ODE on a uniform u grid."""

    case: str
    u: np.ndarray
    f: np.ndarray
    phi: np.ndarray
    p: np.ndarray
    g: np.ndarray
    params: Dict[str, float]
    step: float
    residual_max: float = float("nan")
    first_integral_residual: float = float("nan")
    stop_reason: str = "completed"
    residual: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def kind(self) -> str:
        return case_kind(self.case)

    @property
    def u_span(self) -> Tuple[float, float]:
        return float(self.u[0]), float(self.u[-1])

    @property
    def df(self) -> np.ndarray:
        return slope_functions(self.kind)[0](self.phi)

    @property
    def dg(self) -> np.ndarray:
        return slope_functions(self.kind)[1](self.phi)

    @property
    def d2f(self) -> np.ndarray:
        sign = 1.0 if self.kind == ELLIPTIC else -1.0
        return sign * self.dg * self.p / self.f

    def state(self) -> np.ndarray:
        return np.column_stack([self.f, self.phi, self.p, self.g])

    def table(self) -> np.ndarray:
        """Rows (u, f, f', f'', residual); residual is NaN where the stencil does not fit."""
        res = self.residual if self.residual is not None else np.full_like(self.u, np.nan)
        return np.column_stack([self.u, self.f, self.df, self.d2f, res])


def _from_states(case: str, u: np.ndarray, states: np.ndarray, params: Dict[str, float],
                 step: float, stop_reason: str = "completed") -> OdeSolution:
    return OdeSolution(case=case, u=u, f=states[:, 0], phi=states[:, 1], p=states[:, 2],
                       g=states[:, 3], params=dict(params), step=step, stop_reason=stop_reason)


def _integrate(case: str, params: Dict[str, float], y0: np.ndarray, u_span,
               step: float, guard: RegimeGuard) -> OdeSolution:
    a, b = (float(x) for x in u_span)
    if not a < b:
        raise ValueError(f"u_span must satisfy start < end, got {u_span}")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    steps = max(int(math.ceil((b - a) / step - 1e-9)), MIN_ODE_STEPS)
    h = (b - a) / steps
    u = a + h * np.arange(steps + 1)

    problem = guard.check(y0)
    if problem is not None:
        error, message = problem
        raise error(f"initial state rejected: {message}", u_stop=a)

    rhs = make_system(case, params)
    states = np.empty((steps + 1, 4))
    states[0] = y0
    for k in range(steps):
        with np.errstate(all="ignore"):
            candidate = rk4_step(rhs, u[k], states[k], h)
        problem = guard.check(candidate)
        if problem is not None:
            error, message = problem
            partial = _from_states(case, u[:k + 1], states[:k + 1], params, h, stop_reason=message)
            raise error(message, u_stop=float(u[k]), partial=partial)
        states[k + 1] = candidate
    return _from_states(case, u, states, params, h)


def _with_residuals(sol: OdeSolution) -> OdeSolution:
    residual = residual_profile(sol)
    fi = first_integral_residual(sol) if case_family(sol.case) == "second" else float("nan")
    return OdeSolution(case=sol.case, u=sol.u, f=sol.f, phi=sol.phi, p=sol.p, g=sol.g,
                       params=sol.params, step=sol.step,
                       residual_max=float(np.nanmax(np.abs(residual))),
                       first_integral_residual=fi, stop_reason=sol.stop_reason,
                       residual=residual)


def solve_first_kind(kind: str, f0: float, phi0: float, p0: float, u_span=DEFAULT_U_SPAN,
                     step: float = DEFAULT_ODE_STEP, require_nonzero_slope: bool = True) -> OdeSolution:
    """
    Integrate the first-kind profile ODE.

    Args:
        kind: 'elliptic' or 'hyperbolic'
        f0: f at the start of u_span (must be positive)
        phi0: Initial slope angle
        p0: Initial value of f phi'
        u_span: Integration interval
        step: RK4 step
        require_nonzero_slope: Keep g' away from zero on its initial branch

    Returns:
        OdeSolution with the literal ODE residual attached

    Raises:
        BlowUp, ConstraintError: On regime violations
    """
    check_kind(kind)
    if f0 <= 0:
        raise ConstraintError("f0 must be positive", u_stop=float(u_span[0]))
    case = FIRST_ELLIPTIC if kind == ELLIPTIC else FIRST_HYPERBOLIC
    params = {"f0": float(f0), "phi0": float(phi0), "p0": float(p0)}
    slope = float(np.sign(slope_functions(kind)[1](phi0))) if require_nonzero_slope else 0.0
    if require_nonzero_slope and slope == 0.0:
        raise ConstraintError("g' vanishes at the initial point", u_stop=float(u_span[0]))
    guard = RegimeGuard(kind=kind, slope_sign=slope)
    y0 = np.array([f0, phi0, p0, 0.0])
    return _with_residuals(_integrate(case, params, y0, u_span, step, guard))


def solve_second_kind(kind: str, f0: float, df0: float, d2f0: float, c: float,
                      u_span=DEFAULT_U_SPAN, step: float = DEFAULT_ODE_STEP,
                      residual_tol: float = RESIDUAL_TOL, check_reduction: bool = True) -> OdeSolution:
    """
    Integrate the second-kind profile ODE through its first integral.

    Initial data are f, f' and f'' at the start of u_span; c is the
    constant of the first integral.

    Raises:
        ConstraintError: c = 0 or initial data outside the branch
        SingularDenominator: 1 + c f' (elliptic) / 1 - c f' (hyperbolic) vanishes
        ReductionMismatch: The literal ODE residual disagrees with the first integral
    """
    check_kind(kind)
    start = float(u_span[0])
    if c == 0:
        raise ConstraintError("c must be nonzero", u_stop=start)
    if f0 <= 0:
        raise ConstraintError("f0 must be positive", u_stop=start)
    if kind == ELLIPTIC:
        if df0 <= 1.0:
            raise ConstraintError("elliptic second-kind solutions need f'(u0) > 1", u_stop=start)
        phi0 = math.acosh(df0)
        dphi0 = d2f0 / math.sinh(phi0)
        case = SECOND_ELLIPTIC
    else:
        if not 0.0 < df0 * df0 < 1.0:
            raise ConstraintError("hyperbolic second-kind solutions need 0 < f'(u0)^2 < 1", u_stop=start)
        phi0 = math.acos(df0)
        dphi0 = -d2f0 / math.sin(phi0)
        case = SECOND_HYPERBOLIC

    den0 = second_kind_denominator(kind, c, phi0)
    if abs(den0) <= DENOMINATOR_TOL:
        raise SingularDenominator("denominator of the reduction vanishes at u0", u_stop=start)
    params = {"f0": float(f0), "df0": float(df0), "d2f0": float(d2f0), "c": float(c)}
    guard = RegimeGuard(kind=kind, slope_sign=float(np.sign(slope_functions(kind)[1](phi0))),
                        c=float(c), denominator_sign=float(np.sign(den0)))
    y0 = np.array([f0, phi0, f0 * dphi0, 0.0])
    sol = _with_residuals(_integrate(case, params, y0, u_span, step, guard))

    if check_reduction:
        literal, fi = sol.residual_max, sol.first_integral_residual
        if literal > max(MISMATCH_FACTOR * fi, residual_tol):
            raise ReductionMismatch(
                f"literal ODE residual {literal:.3g} vs first-integral residual {fi:.3g}",
                u_stop=sol.u_span[1], partial=sol)
    return sol


def solve_constant_product(kind: str, f0: float, phi0: float, a: float, u_span=DEFAULT_U_SPAN,
                           step: float = DEFAULT_ODE_STEP) -> OdeSolution:
    """Profile with f kappa_m = a, i.e. phi' = a / f."""
    check_kind(kind)
    if f0 <= 0:
        raise ConstraintError("f0 must be positive", u_stop=float(u_span[0]))
    slope = float(np.sign(slope_functions(kind)[1](phi0)))
    if slope == 0.0:
        raise ConstraintError("g' vanishes at the initial point", u_stop=float(u_span[0]))
    case = PRODUCT_ELLIPTIC if kind == ELLIPTIC else PRODUCT_HYPERBOLIC
    params = {"f0": float(f0), "phi0": float(phi0), "a": float(a)}
    guard = RegimeGuard(kind=kind, slope_sign=slope)
    y0 = np.array([f0, phi0, a, 0.0])
    return _with_residuals(_integrate(case, params, y0, u_span, step, guard))


def solve_case(case: str, params: Dict[str, float], u_span=DEFAULT_U_SPAN,
               step: float = DEFAULT_ODE_STEP) -> OdeSolution:
    """Dispatch by case tag; missing parameters fall back to DEFAULT_PARAMS."""
    kind = case_kind(case)
    merged = dict(DEFAULT_PARAMS[case])
    unknown = set(params) - set(merged)
    if unknown:
        raise ValueError(f"unknown parameters for {case}: {', '.join(sorted(unknown))}")
    merged.update({k: float(v) for k, v in params.items()})
    family = case_family(case)
    if family == "first":
        return solve_first_kind(kind, merged["f0"], merged["phi0"], merged["p0"], u_span, step)
    if family == "second":
        return solve_second_kind(kind, merged["f0"], merged["df0"], merged["d2f0"], merged["c"],
                                 u_span, step)
    return solve_constant_product(kind, merged["f0"], merged["phi0"], merged["a"], u_span, step)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def central_difference(y: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central first derivative; NaN on the two edge samples at each end."""
    d = np.full_like(y, np.nan, dtype=float)
    if len(y) >= 5:
        d[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * h)
    return d


def _second_kind_phi(sol: OdeSolution) -> np.ndarray:
    """The y^n coefficient of C written in f, f', f'' and (f f'')'."""
    f, fp, fpp = sol.f, sol.df, sol.d2f
    s = sol.dg
    dw = central_difference(f * fpp, sol.step)
    if sol.kind == ELLIPTIC:
        S = fp * fp - 1.0
        num = s * (f * S * dw - f * f * fp * fpp ** 2 - fp * S ** 2)
        den = S ** 2 + f * f * fpp ** 2 - f * fp * S * dw
    else:
        S = 1.0 - fp * fp
        num = s * (f * S * dw + f * f * fp * fpp ** 2 + fp * S ** 2)
        den = S ** 2 + f * f * fpp ** 2 + f * fp * S * dw
    return num / den


def residual_profile(sol: OdeSolution) -> np.ndarray:
    """Pointwise residual of the case's literal ODE (NaN where stencils do not fit)."""
    family = case_family(sol.case)
    h = sol.step
    need = 9 if family == "second" else 5
    if len(sol.u) < need:
        raise ValueError(f"{sol.case} residual needs at least {need} samples")

    if family == "first":
        s = np.abs(sol.dg)
        fpp = sol.d2f
        q = np.divide(sol.f * fpp, s, out=np.zeros_like(s), where=s > 0)
        sign = -1.0 if sol.kind == ELLIPTIC else 1.0
        return sol.f * central_difference(q, h) + sign * sol.df * s
    if family == "second":
        fp, fpp = sol.df, sol.d2f
        with np.errstate(divide="ignore", invalid="ignore"):
            log_phi = np.log(np.abs(_second_kind_phi(sol)))
        if sol.kind == ELLIPTIC:
            rhs = fp * fpp / (fp * fp - 1.0)
        else:
            rhs = -fp * fpp / (1.0 - fp * fp)
        return central_difference(log_phi, h) - rhs
    return sol.f * central_difference(sol.phi, h) - sol.params["a"]


def first_integral_residual(sol: OdeSolution) -> float:
    """max |phi_C - c g'| over samples where the stencil fits (second kind only)."""
    if case_family(sol.case) != "second":
        raise ValueError("first integral is defined for second-kind solutions only")
    diff = _second_kind_phi(sol) - sol.params["c"] * sol.dg
    return float(np.nanmax(np.abs(diff)))


def ode_residual(sol: OdeSolution) -> float:
    """Max-abs residual of the literal ODE over interior samples."""
    return float(np.nanmax(np.abs(residual_profile(sol))))


# ---------------------------------------------------------------------------
# dense output
# ---------------------------------------------------------------------------

def profile_from_solution(sol: OdeSolution) -> ProfileCurve:
    """
    Cubic Hermite dense output of a solution as a ProfileCurve.

    phi' = p/f and phi'' = (p' f - p f') / f^2 use the ODE right-hand side
    at the interpolated state.
    """
    rhs = make_system(sol.case, sol.params)
    states = sol.state()
    slopes = rhs(sol.u, states.T).T
    spline = CubicHermiteSpline(sol.u, states, slopes, axis=0)

    def interp(u):
        return spline(np.asarray(u, dtype=float))

    def phi(u):
        return interp(u)[..., 1]

    def dphi(u):
        st = interp(u)
        return st[..., 2] / st[..., 0]

    def d2phi(u):
        st = interp(u)
        d = rhs(u, np.moveaxis(st, -1, 0))
        f, p = st[..., 0], st[..., 2]
        return (d[2] * f - p * d[0]) / (f * f)

    def primitive(u):
        st = interp(u)
        return st[..., 0], st[..., 3]

    return ProfileCurve(kind=sol.kind, phi=phi, dphi=dphi, d2phi=d2phi, f0=float(sol.f[0]),
                        g0=float(sol.g[0]), u0=float(sol.u[0]), u_domain=sol.u_span,
                        primitive=primitive)
