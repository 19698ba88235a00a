"""
Surface Module

Meridian surfaces of elliptic and hyperbolic type in R^4_1, their
adapted frames, mean curvature vector, Gauss map and the closed-form
Laplacian of the Gauss map.

    elliptic:   z(u, v) = f(u) l(v) + g(u) e4,  l in span{e1, e2, e3}
    hyperbolic: z(u, v) = f(u) l(v) + g(u) e1,  l in span{e2, e3, e4}

The frame is x = z_u, y = z_v / f plus two normals n1, n2 with
<n2, n2> = -1. The metric coefficient <z_v, z_v> = f^2 is called
``metric_coefficient`` to keep it apart from the Gauss map G.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from curves import (ELLIPTIC, ProfileCurve, SphericalCurve, axis_vector, embed,
                    integrate_spherical)
from errors import DomainError
from minkowski_algebra import (Bivector, SpacetimeVector, inner4_array, is_lorentz,
                               wedge_array)


@dataclass(frozen=True)
class FrameAtPoint:
    """Adapted frame {x, y, n1, n2} at (u, v)."""

    u: float
    v: float
    x: SpacetimeVector
    y: SpacetimeVector
    n1: SpacetimeVector
    n2: SpacetimeVector

    def gram(self) -> np.ndarray:
        vecs = np.stack([self.x.to_array(), self.y.to_array(),
                         self.n1.to_array(), self.n2.to_array()])
        return inner4_array(vecs[:, None, :], vecs[None, :, :])


@dataclass(frozen=True)
class FrameArrays:
    """Frame vectors on a grid, each of shape (..., 4)."""

    x: np.ndarray
    y: np.ndarray
    n1: np.ndarray
    n2: np.ndarray


@dataclass(frozen=True)
class SurfaceScalars:
    """Profile and base-curve scalars entering the curvature formulas."""

    f: np.ndarray
    df: np.ndarray
    dg: np.ndarray
    kappa_m: np.ndarray
    d_f_kappa_m: np.ndarray
    kappa: np.ndarray
    dkappa: np.ndarray


@dataclass(frozen=True)
class SurfaceGrid:
    """Tensor grid of parameter values; mesh() uses ij indexing."""

    u: np.ndarray
    v: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.u), len(self.v)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.u, self.v, indexing="ij")


@dataclass(frozen=True, eq=False)
class MeridianSurface:
    """
    Meridian surface built from a profile curve and an integrated base curve.

    ``motion`` and ``translation`` describe an optional rigid motion of
    R^4_1 applied after construction: points map to motion @ z + translation,
    vectors to motion @ w.
    """

    profile: ProfileCurve
    base: SphericalCurve
    motion: np.ndarray = field(default_factory=lambda: np.eye(4))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(4))

    @property
    def kind(self) -> str:
        return self.profile.kind

    @property
    def u_domain(self) -> Tuple[float, float]:
        return self.profile.u_domain

    @property
    def v_domain(self) -> Tuple[float, float]:
        return self.base.v_domain

    def moved(self, lorentz: np.ndarray, translation: Optional[np.ndarray] = None) -> "MeridianSurface":
        """Compose a rigid motion (lorentz, translation) onto the surface."""
        lorentz = np.asarray(lorentz, dtype=float)
        if not is_lorentz(lorentz, tol=1e-9):
            raise ValueError("motion matrix does not preserve the Minkowski metric")
        shift = np.zeros(4) if translation is None else np.asarray(translation, dtype=float)
        return replace(self, motion=lorentz @ self.motion,
                       translation=lorentz @ self.translation + shift)

    def check_point(self, u, v, margin_u: float = 0.0, margin_v=0.0) -> None:
        if not self.profile.contains(u, margin_u):
            raise DomainError(f"u outside {self.u_domain} (margin {margin_u:g})")
        if not self.base.contains(v, margin_v):
            raise DomainError(f"v outside {self.v_domain}")

    def _vectors(self, arr: np.ndarray) -> np.ndarray:
        return arr @ self.motion.T

    # -- scalar fields -----------------------------------------------------

    def scalars(self, u, v) -> SurfaceScalars:
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        p = self.profile
        f = p.f(u)
        return SurfaceScalars(f=f, df=p.df(u), dg=p.dg(u), kappa_m=p.kappa_m(u),
                              d_f_kappa_m=p.d_f_kappa_m(u, f=f),
                              kappa=self.base.kappa_at(v), dkappa=self.base.dkappa_at(v))

    # -- vectorised geometry -----------------------------------------------

    def immersion_array(self, u, v) -> np.ndarray:
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        self.check_point(u, v)
        f, g = self.profile.f_and_g(u)
        l, _, _ = self.base.frame(v)
        z = f[..., None] * embed(self.kind, l) + g[..., None] * axis_vector(self.kind)
        return self._vectors(z) + self.translation

    def frame_arrays(self, u, v) -> FrameArrays:
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        self.check_point(u, v)
        fp = self.profile.df(u)[..., None]
        gp = self.profile.dg(u)[..., None]
        l, t, n = (embed(self.kind, w) for w in self.base.frame(v))
        axis = axis_vector(self.kind)
        x = fp * l + gp * axis
        if self.kind == ELLIPTIC:
            n1 = n
            n2 = gp * l + fp * axis
        else:
            n1 = gp * l - fp * axis
            n2 = n
        return FrameArrays(x=self._vectors(x), y=self._vectors(t),
                           n1=self._vectors(n1), n2=self._vectors(n2))

    def gauss_map_array(self, u, v) -> np.ndarray:
        fr = self.frame_arrays(u, v)
        return wedge_array(fr.x, fr.y)

    def mean_curvature_array(self, u, v) -> np.ndarray:
        fr = self.frame_arrays(u, v)
        sc = self.scalars(u, v)
        a = (sc.kappa / sc.f)[..., None]
        b = (sc.kappa_m + sc.dg / sc.f)[..., None]
        if self.kind == ELLIPTIC:
            return 0.5 * (a * fr.n1 + b * fr.n2)
        return -0.5 * (b * fr.n1 + a * fr.n2)

    def laplacian_coefficients(self, u, v) -> dict:
        """Coefficients of Delta G on the frame bivectors x^y, x^n1, x^n2, y^n1, y^n2."""
        sc = self.scalars(u, v)
        f2 = sc.f ** 2
        zero = np.zeros_like(f2)
        if self.kind == ELLIPTIC:
            return {
                "xy": (sc.kappa ** 2 - sc.dg ** 2 - f2 * sc.kappa_m ** 2) / f2,
                "xn1": -sc.dkappa / f2,
                "xn2": zero,
                "yn1": -sc.kappa * sc.df / f2,
                "yn2": (sc.f * sc.d_f_kappa_m - sc.df * sc.dg) / f2,
            }
        return {
            "xy": (-sc.kappa ** 2 + sc.dg ** 2 + f2 * sc.kappa_m ** 2) / f2,
            "xn1": zero,
            "xn2": sc.dkappa / f2,
            "yn1": (sc.df * sc.dg - sc.f * sc.d_f_kappa_m) / f2,
            "yn2": sc.kappa * sc.df / f2,
        }

    def laplacian_closed_array(self, u, v) -> np.ndarray:
        fr = self.frame_arrays(u, v)
        c = self.laplacian_coefficients(u, v)
        pairs = {"xy": (fr.x, fr.y), "xn1": (fr.x, fr.n1), "xn2": (fr.x, fr.n2),
                 "yn1": (fr.y, fr.n1), "yn2": (fr.y, fr.n2)}
        total = 0.0
        for key, (a, b) in pairs.items():
            total = total + c[key][..., None] * wedge_array(a, b)
        return total

    def normal_rotation_array(self, u, v, theta: float) -> Tuple[np.ndarray, np.ndarray]:
        """Rotated normals n = cosh(th) n1 + sinh(th) n2 and n_perp = sinh(th) n1 + cosh(th) n2."""
        fr = self.frame_arrays(u, v)
        ch, sh = np.cosh(theta), np.sinh(theta)
        return ch * fr.n1 + sh * fr.n2, sh * fr.n1 + ch * fr.n2


def make_surface(profile: ProfileCurve, base: SphericalCurve) -> MeridianSurface:
    """
    Assemble a meridian surface, integrating the base curve if needed.

    Args:
        profile: Profile curve
        base: Spherical base curve of the same kind

    Returns:
        MeridianSurface
    """
    if profile.kind != base.kind:
        raise ValueError(f"profile is {profile.kind} but base curve is {base.kind}")
    if not base.integrated:
        base = integrate_spherical(base)
    return MeridianSurface(profile=profile, base=base)


def make_grid(surface: MeridianSurface, nu: int = 50, nv: int = 50, margin: float = 0.05) -> SurfaceGrid:
    """Uniform interior grid keeping `margin` away from every domain edge."""
    if nu < 1 or nv < 1:
        raise ValueError("grid sizes must be positive")
    (ua, ub), (va, vb) = surface.u_domain, surface.v_domain
    if margin < 0 or 2 * margin >= min(ub - ua, vb - va):
        raise ValueError(f"margin {margin} does not fit the surface domain")
    u = np.linspace(ua + margin, ub - margin, nu) if nu > 1 else np.array([(ua + ub) / 2])
    v = np.linspace(va + margin, vb - margin, nv) if nv > 1 else np.array([(va + vb) / 2])
    return SurfaceGrid(u=u, v=v)


# ---------------------------------------------------------------------------
# point operations
# ---------------------------------------------------------------------------

def immersion(s: MeridianSurface, u: float, v: float) -> SpacetimeVector:
    return SpacetimeVector.from_array(s.immersion_array(u, v))


def frame(s: MeridianSurface, u: float, v: float) -> FrameAtPoint:
    fr = s.frame_arrays(u, v)
    return FrameAtPoint(u=float(u), v=float(v),
                        x=SpacetimeVector.from_array(fr.x), y=SpacetimeVector.from_array(fr.y),
                        n1=SpacetimeVector.from_array(fr.n1), n2=SpacetimeVector.from_array(fr.n2))


def mean_curvature_vector(s: MeridianSurface, u: float, v: float) -> SpacetimeVector:
    """
    Mean curvature vector H.

    elliptic:   H = 1/2 [(kappa/f) n1 + (kappa_m + g'/f) n2]
    hyperbolic: H = -1/2 [(kappa_m + g'/f) n1 + (kappa/f) n2]
    """
    return SpacetimeVector.from_array(s.mean_curvature_array(u, v))


def gauss_map(s: MeridianSurface, u: float, v: float) -> Bivector:
    """G = x ^ y."""
    return Bivector.from_array(s.gauss_map_array(u, v))


def laplacian_closed(s: MeridianSurface, u: float, v: float) -> Bivector:
    """
    Closed-form Laplacian of the Gauss map.

    elliptic:
        (kappa^2 - g'^2 - f^2 kappa_m^2)/f^2 x^y - kappa'/f^2 x^n1
        - kappa f'/f^2 y^n1 + (f (f kappa_m)' - f' g')/f^2 y^n2
    hyperbolic:
        (-kappa^2 + g'^2 + f^2 kappa_m^2)/f^2 x^y + kappa'/f^2 x^n2
        + (f' g' - f (f kappa_m)')/f^2 y^n1 + kappa f'/f^2 y^n2

    kappa' is the derivative with respect to v.
    """
    return Bivector.from_array(s.laplacian_closed_array(u, v))


def normal_frame_rotation(s: MeridianSurface, u: float, v: float,
                          theta: float) -> Tuple[SpacetimeVector, SpacetimeVector]:
    """(n, n_perp) obtained by rotating {n1, n2} through the hyperbolic angle theta."""
    n, n_perp = s.normal_rotation_array(u, v, theta)
    return SpacetimeVector.from_array(n), SpacetimeVector.from_array(n_perp)


def metric_coefficient(s: MeridianSurface, u: float) -> float:
    """<z_v, z_v> = f(u)^2."""
    return float(s.profile.f(u) ** 2)


def first_fundamental_form(s: MeridianSurface, u: float, v: float) -> Tuple[float, float, float]:
    """(E, F, metric_coefficient) from the frame vectors z_u = x and z_v = f y."""
    fr = s.frame_arrays(u, v)
    f = float(s.profile.f(u))
    return (float(inner4_array(fr.x, fr.x)), float(f * inner4_array(fr.x, fr.y)),
            float(f * f * inner4_array(fr.y, fr.y)))


def sample_points(s: MeridianSurface, grid: SurfaceGrid) -> np.ndarray:
    """Point cloud rows (u, v, x1, x2, x3, x4) in ij grid order."""
    uu, vv = grid.mesh()
    z = s.immersion_array(uu, vv)
    return np.column_stack([uu.ravel(), vv.ravel(), z.reshape(-1, 4)])
