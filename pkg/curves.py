"""
Curves Module

Profile (meridian) curves in slope-angle form and spherical base curves
integrated from a prescribed spherical curvature via the Frenet systems.

Profiles: f' = cosh(phi), g' = sinh(phi) for the elliptic kind and
f' = cos(phi), g' = sin(phi) for the hyperbolic kind, so the unit-speed
constraint holds identically and kappa_m = phi'.

Base curves: the elliptic kind lives on S^2(1) in R^3 and satisfies
l' = t, t' = kappa n - l, n' = -kappa t. The hyperbolic kind lives on the
de Sitter sphere in R^3_1 (metric diag(1, 1, -1)) with t' = -kappa n - l.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad_vec
from scipy.interpolate import BSpline, make_interp_spline

from errors import DomainError, FrameError

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"
KINDS = (ELLIPTIC, HYPERBOLIC)

DEFAULT_FRENET_STEP = 1e-3
FRAME_GRAM_TOL = 1e-12
PROFILE_CHECK_SAMPLES = 257
QUADRATURE_TOL = 1e-13
DOMAIN_SLACK = 1e-12
MIN_FRENET_STEPS = 8

FunctionSpec = Union[float, Sequence[float], Polynomial, Callable]


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def slope_functions(kind: str) -> Tuple[Callable, Callable]:
    """Return (f'(phi), g'(phi)) for the kind."""
    if check_kind(kind) == ELLIPTIC:
        return np.cosh, np.sinh
    return np.cos, np.sin


def ambient_metric(kind: str) -> np.ndarray:
    """Diagonal metric of the 3-space holding the base curve."""
    if check_kind(kind) == ELLIPTIC:
        return np.array([1.0, 1.0, 1.0])
    return np.array([1.0, 1.0, -1.0])


def frame_targets(kind: str) -> np.ndarray:
    """Target Gram matrix of (l, t, n)."""
    return np.diag(ambient_metric(kind))


def axis_vector(kind: str) -> np.ndarray:
    """Rotation axis of the meridian surface: e4 (elliptic) or e1 (hyperbolic)."""
    if check_kind(kind) == ELLIPTIC:
        return np.array([0.0, 0.0, 0.0, 1.0])
    return np.array([1.0, 0.0, 0.0, 0.0])


def embed(kind: str, vec3: np.ndarray) -> np.ndarray:
    """Place base-curve 3-vectors into R^4_1 (span{e1,e2,e3} or span{e2,e3,e4})."""
    vec3 = np.asarray(vec3, dtype=float)
    pad = np.zeros(vec3.shape[:-1] + (1,))
    if check_kind(kind) == ELLIPTIC:
        return np.concatenate([vec3, pad], axis=-1)
    return np.concatenate([pad, vec3], axis=-1)


def as_function(spec: FunctionSpec, derivative: Optional[Callable] = None,
                second: Optional[Callable] = None) -> Tuple[Callable, Optional[Callable], Optional[Callable], bool]:
    """
    Normalise a scalar function specification.

    Args:
        spec: Constant, ascending polynomial coefficients, numpy Polynomial or callable
        derivative: Optional first derivative for callables
        second: Optional second derivative for callables

    Returns:
        Tuple (function, derivative, second derivative, closed_form)
    """
    if callable(spec) and not isinstance(spec, Polynomial):
        return spec, derivative, second, False
    poly = spec if isinstance(spec, Polynomial) else Polynomial(np.atleast_1d(np.asarray(spec, dtype=float)))
    return poly, poly.deriv(1), poly.deriv(2), True


def _check_interval(interval, name: str) -> Tuple[float, float]:
    a, b = (float(x) for x in interval)
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise ValueError(f"{name} must be a finite interval with start < end, got {interval}")
    return a, b


# ---------------------------------------------------------------------------
# profile curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileCurve:
    """
    Meridian curve m(u) = (f(u), g(u)) in slope-angle form.

    f and g are primitives of the slope functions anchored at u0 with
    f(u0) = f0 and g(u0) = g0. Profiles produced by the ODE solvers pass
    ``primitive`` (dense output) instead of relying on quadrature.
    """

    kind: str
    phi: Callable
    dphi: Callable
    d2phi: Callable
    f0: float
    g0: float
    u0: float
    u_domain: Tuple[float, float]
    primitive: Optional[Callable] = field(default=None, repr=False, compare=False)

    def f_and_g(self, u) -> Tuple[np.ndarray, np.ndarray]:
        u = np.asarray(u, dtype=float)
        if self.primitive is not None:
            return self.primitive(u)
        flat = u.ravel()
        if flat.size == 0:
            return u.copy(), u.copy()
        du = flat - self.u0
        fp, gp = slope_functions(self.kind)

        def integrand(s):
            phi = self.phi(self.u0 + s * du)
            return np.concatenate([du * fp(phi), du * gp(phi)])

        res, _ = quad_vec(integrand, 0.0, 1.0, epsabs=QUADRATURE_TOL,
                          epsrel=QUADRATURE_TOL, norm="max")
        n = flat.size
        return (self.f0 + res[:n]).reshape(u.shape), (self.g0 + res[n:]).reshape(u.shape)

    def f(self, u) -> np.ndarray:
        return self.f_and_g(u)[0]

    def g(self, u) -> np.ndarray:
        return self.f_and_g(u)[1]

    def df(self, u) -> np.ndarray:
        return slope_functions(self.kind)[0](self.phi(np.asarray(u, dtype=float)))

    def dg(self, u) -> np.ndarray:
        return slope_functions(self.kind)[1](self.phi(np.asarray(u, dtype=float)))

    def d2f(self, u) -> np.ndarray:
        # elliptic: sinh(phi) phi', hyperbolic: -sin(phi) phi'
        sign = 1.0 if self.kind == ELLIPTIC else -1.0
        return sign * self.dg(u) * self.dphi(np.asarray(u, dtype=float))

    def d2g(self, u) -> np.ndarray:
        return self.df(u) * self.dphi(np.asarray(u, dtype=float))

    def kappa_m(self, u) -> np.ndarray:
        return self.dphi(np.asarray(u, dtype=float))

    def d_f_kappa_m(self, u, f=None) -> np.ndarray:
        """(f kappa_m)' = f' phi' + f phi''."""
        u = np.asarray(u, dtype=float)
        f = self.f(u) if f is None else f
        return self.df(u) * self.dphi(u) + f * self.d2phi(u)

    def contains(self, u, margin: float = 0.0) -> bool:
        u = np.asarray(u, dtype=float)
        a, b = self.u_domain
        return bool(np.all(u >= a + margin - DOMAIN_SLACK) and np.all(u <= b - margin + DOMAIN_SLACK))

    def require_nonzero_slope(self, tol: float = 1e-12) -> None:
        """Raise DomainError when g' vanishes somewhere on the sampled domain."""
        u = np.linspace(*self.u_domain, PROFILE_CHECK_SAMPLES)
        if np.min(np.abs(self.dg(u))) <= tol:
            raise DomainError(f"{self.kind} profile has g' = 0 on its domain")


def make_profile(kind: str, phi: FunctionSpec, f0: float, g0: float, u_domain,
                 dphi: Optional[Callable] = None, d2phi: Optional[Callable] = None,
                 u0: Optional[float] = None) -> ProfileCurve:
    """
    Build a profile curve from its slope angle.

    Args:
        kind: 'elliptic' or 'hyperbolic'
        phi: Slope angle as a constant, polynomial coefficients (ascending),
            numpy Polynomial, or a vectorised callable
        f0: Value of f at the anchor u0
        g0: Value of g at the anchor u0
        u_domain: Closed interval (start, end)
        dphi: First derivative, required when phi is a callable
        d2phi: Second derivative, required when phi is a callable
        u0: Anchor point (defaults to the start of u_domain)

    Returns:
        ProfileCurve

    Raises:
        DomainError: If f <= 0 anywhere on the sampled domain
    """
    check_kind(kind)
    a, b = _check_interval(u_domain, "u_domain")
    func, d1, d2, _ = as_function(phi, dphi, d2phi)
    if d1 is None or d2 is None:
        raise ValueError("a callable phi needs explicit dphi and d2phi")
    anchor = a if u0 is None else float(u0)

    profile = ProfileCurve(kind=kind, phi=func, dphi=d1, d2phi=d2, f0=float(f0),
                           g0=float(g0), u0=anchor, u_domain=(a, b))
    f = profile.f(np.linspace(a, b, PROFILE_CHECK_SAMPLES))
    if not np.all(np.isfinite(f)) or np.min(f) <= 0.0:
        raise DomainError(f"f must stay positive on [{a}, {b}] (min sampled f = {np.min(f):.6g})")
    return profile


def profile_curvature(profile: ProfileCurve, u) -> np.ndarray:
    """kappa_m = phi', equal to f'g'' - g'f'' for either kind."""
    if not profile.contains(u):
        raise DomainError(f"u outside profile domain {profile.u_domain}")
    value = profile.kappa_m(u)
    return float(value) if np.ndim(value) == 0 else value


# ---------------------------------------------------------------------------
# spherical base curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrenetSamples:
    """Frenet frame samples; l, t and n have shape (N, 3)."""

    v: np.ndarray
    l: np.ndarray
    t: np.ndarray
    n: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.stack([self.l, self.t, self.n], axis=1)


@dataclass(frozen=True)
class SphericalCurve:
    """Unit-speed curve on S^2(1) or S^2_1(1) with its Frenet frame (l, t, n)."""

    kind: str
    kappa: Callable
    dkappa: Optional[Callable]
    initial_frame: Tuple[np.ndarray, np.ndarray, np.ndarray]
    v_domain: Tuple[float, float]
    step: float = DEFAULT_FRENET_STEP
    kappa_closed_form: bool = True
    samples: Optional[FrenetSamples] = None
    interpolant: Optional[BSpline] = field(default=None, repr=False, compare=False)

    @property
    def integrated(self) -> bool:
        return self.samples is not None

    def contains(self, v, margin: float = 0.0) -> bool:
        v = np.asarray(v, dtype=float)
        a, b = self.v_domain
        return bool(np.all(v >= a + margin - DOMAIN_SLACK) and np.all(v <= b - margin + DOMAIN_SLACK))

    def frame(self, v) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Evaluate (l, t, n) at v; each result has shape v.shape + (3,)."""
        if not self.integrated:
            raise ValueError("spherical curve has not been integrated")
        if not self.contains(v):
            raise DomainError(f"v outside base-curve domain {self.v_domain}")
        vals = self.interpolant(np.asarray(v, dtype=float))
        vals = vals.reshape(vals.shape[:-1] + (3, 3))
        return vals[..., 0, :], vals[..., 1, :], vals[..., 2, :]

    def kappa_at(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.broadcast_to(np.asarray(self.kappa(v), dtype=float), v.shape).copy()

    def dkappa_at(self, v) -> np.ndarray:
        if self.dkappa is None:
            raise ValueError("kappa' is only available after integration")
        v = np.asarray(v, dtype=float)
        return np.broadcast_to(np.asarray(self.dkappa(v), dtype=float), v.shape).copy()


def make_spherical(kind: str, kappa: FunctionSpec, initial_frame=None, v_domain=(0.0, 1.0),
                   step: float = DEFAULT_FRENET_STEP,
                   dkappa: Optional[Callable] = None) -> SphericalCurve:
    """
    Describe a base curve by its spherical curvature; integrate it with
    integrate_spherical before use.
    """
    check_kind(kind)
    domain = _check_interval(v_domain, "v_domain")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    func, d1, _, closed = as_function(kappa, dkappa)
    if initial_frame is None:
        initial_frame = np.eye(3)
    frame = tuple(np.asarray(vec, dtype=float).reshape(3) for vec in initial_frame)
    if len(frame) != 3:
        raise FrameError("initial frame must contain exactly three vectors (l0, t0, n0)")
    return SphericalCurve(kind=kind, kappa=func, dkappa=d1, initial_frame=frame,
                          v_domain=domain, step=float(step), kappa_closed_form=closed)


def _frenet_rhs(kind: str) -> Callable:
    sign = 1.0 if kind == ELLIPTIC else -1.0

    def rhs(kappa: float, frame: np.ndarray) -> np.ndarray:
        l, t, n = frame
        return np.array([t, sign * kappa * n - l, -kappa * t])

    return rhs


def frame_gram(kind: str, frames: np.ndarray) -> np.ndarray:
    """Gram matrices of stacked frames of shape (..., 3, 3)."""
    return np.einsum("...ai,i,...bi->...ab", frames, ambient_metric(kind), frames)


def integrate_spherical(curve: SphericalCurve) -> SphericalCurve:
    """
    Integrate the Frenet system with fixed-step RK4.

    The samples are interpolated by a quintic spline so frames can be
    evaluated (and differentiated) anywhere on v_domain.

    Raises:
        FrameError: If the initial frame violates its Gram constraints
    """
    kind = curve.kind
    start = np.stack(curve.initial_frame)
    defect = np.max(np.abs(frame_gram(kind, start) - frame_targets(kind)))
    if defect > FRAME_GRAM_TOL:
        raise FrameError(f"initial frame Gram defect {defect:.3g} exceeds {FRAME_GRAM_TOL:g}")

    a, b = curve.v_domain
    steps = max(int(np.ceil((b - a) / curve.step - 1e-9)), MIN_FRENET_STEPS)
    h = (b - a) / steps
    v = a + h * np.arange(steps + 1)
    kap_nodes = np.asarray(curve.kappa_at(v), dtype=float)
    kap_mid = np.asarray(curve.kappa_at(v[:-1] + h / 2), dtype=float)
    if not (np.all(np.isfinite(kap_nodes)) and np.all(np.isfinite(kap_mid))):
        raise ValueError("kappa must be finite on v_domain")

    rhs = _frenet_rhs(kind)
    frames = np.empty((steps + 1, 3, 3))
    frames[0] = start
    for k in range(steps):
        y = frames[k]
        k1 = rhs(kap_nodes[k], y)
        k2 = rhs(kap_mid[k], y + h / 2 * k1)
        k3 = rhs(kap_mid[k], y + h / 2 * k2)
        k4 = rhs(kap_nodes[k + 1], y + h * k3)
        frames[k + 1] = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    samples = FrenetSamples(v=v, l=frames[:, 0], t=frames[:, 1], n=frames[:, 2])
    spline = make_interp_spline(v, frames.reshape(steps + 1, 9), k=5)

    dkappa = curve.dkappa
    if dkappa is None:
        # central differences on the sample grid
        dkappa = make_interp_spline(v, np.gradient(kap_nodes, v, edge_order=2), k=3)
    return replace(curve, samples=samples, interpolant=spline, dkappa=dkappa)


def gram_defect(curve: SphericalCurve) -> float:
    """Max deviation of the sampled (l, t, n) Gram matrices from their target."""
    if curve.samples is None or len(curve.samples.v) == 0:
        raise ValueError("gram_defect needs a sampled curve")
    gram = frame_gram(curve.kind, curve.samples.stacked())
    return float(np.max(np.abs(gram - frame_targets(curve.kind))))
