"""
Laplacian Oracle Module

Finite-difference Laplacian of the Gauss map, computed from its
definition and used as an independent check of the closed forms in
surface.py.

Reduction to coordinate derivatives
-----------------------------------
For the orthonormal tangent frame {x, y} the Laplacian of a vector
valued map is

    Delta G = -(D_x D_x G - D_{nabla_x x} G) - (D_y D_y G - D_{nabla_y y} G)

where D is the flat derivative of R^4_1 and nabla the induced
connection. With x = d/du and y = (1/f) d/dv:

    D_x D_x G = G_uu
    D_y D_y G = (1/f) d/dv((1/f) G_v) = G_vv / f^2        (f does not depend on v)

From the derivative formulas of the adapted frame, nabla_x x has no
tangential part (D_x x is a multiple of n2 resp. n1), while the
tangential part of D_y y is -(f'/f) x. Hence D_{nabla_x x} G = 0 and
D_{nabla_y y} G = -(f'/f) G_u, so

    Delta G = -G_uu - G_vv / f^2 - (f'/f) G_u.

The partials are taken with central differences (second order). The v
step is h / f so both directions use the same arc-length step.
"""

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from curves import ELLIPTIC
from minkowski_algebra import Bivector
from surface import MeridianSurface, SurfaceGrid

DEFAULT_STEP = 1e-3
FRAME_RESIDUAL_STEP = 1e-4


@dataclass(frozen=True)
class LaplacianReport:
    """Closed form against finite differences at one grid point."""

    u: float
    v: float
    closed_form: Bivector
    finite_diff: Bivector
    defect: float
    step: float

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "closed_form": self.closed_form.to_dict(),
            "finite_diff": self.finite_diff.to_dict(),
            "defect": self.defect,
            "step": self.step,
        }


@dataclass(frozen=True)
class ConvergenceResult:
    step: float
    defect: float
    defect_half_step: float

    @property
    def ratio(self) -> float:
        return self.defect / self.defect_half_step

    @property
    def order(self) -> float:
        return float(np.log2(self.ratio))


def laplacian_fd_array(s: MeridianSurface, u, v, h: float = DEFAULT_STEP) -> np.ndarray:
    """
    Finite-difference Delta G on arrays of points.

    Raises:
        DomainError: If a stencil leaves the surface domain
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    f = s.profile.f(u)
    df = s.profile.df(u)
    hv = h / f
    s.check_point(u, v, margin_u=2 * h, margin_v=2 * hv)

    g0 = s.gauss_map_array(u, v)
    g_up = s.gauss_map_array(u + h, v)
    g_um = s.gauss_map_array(u - h, v)
    g_vp = s.gauss_map_array(u, v + hv)
    g_vm = s.gauss_map_array(u, v - hv)

    g_uu = (g_up - 2 * g0 + g_um) / h ** 2
    g_u = (g_up - g_um) / (2 * h)
    g_vv = (g_vp - 2 * g0 + g_vm) / (hv ** 2)[..., None]
    return -g_uu - g_vv / (f ** 2)[..., None] - (df / f)[..., None] * g_u


def laplacian_fd(s: MeridianSurface, u: float, v: float, h: float = DEFAULT_STEP) -> Bivector:
    return Bivector.from_array(laplacian_fd_array(s, u, v, h))


def compare_laplacians(s: MeridianSurface, grid: SurfaceGrid, h: float = DEFAULT_STEP) -> List[LaplacianReport]:
    """
    Closed form against the oracle on every grid point.

    Args:
        s: Surface
        grid: Grid interior to the domain by at least 2h
        h: Finite-difference step

    Returns:
        One LaplacianReport per grid point, ij order
    """
    uu, vv = grid.mesh()
    closed = s.laplacian_closed_array(uu, vv).reshape(-1, 6)
    fd = laplacian_fd_array(s, uu, vv, h).reshape(-1, 6)
    defects = np.max(np.abs(closed - fd), axis=1)
    return [
        LaplacianReport(u=float(a), v=float(b), closed_form=Bivector.from_array(c),
                        finite_diff=Bivector.from_array(d), defect=float(e), step=h)
        for a, b, c, d, e in zip(uu.ravel(), vv.ravel(), closed, fd, defects)
    ]


def max_defect(reports: List[LaplacianReport]) -> float:
    return max((r.defect for r in reports), default=0.0)


def convergence_study(s: MeridianSurface, grid: SurfaceGrid, h: float) -> ConvergenceResult:
    """Max defect at h and h/2; the ratio should approach 4."""
    return ConvergenceResult(step=h,
                             defect=max_defect(compare_laplacians(s, grid, h)),
                             defect_half_step=max_defect(compare_laplacians(s, grid, h / 2)))


def _frame_predictions(s: MeridianSurface, u, v) -> Dict[str, np.ndarray]:
    fr = s.frame_arrays(u, v)
    sc = s.scalars(u, v)
    km = sc.kappa_m[..., None]
    a = (sc.df / sc.f)[..., None]
    b = (sc.dg / sc.f)[..., None]
    k = (sc.kappa / sc.f)[..., None]
    zero = np.zeros_like(fr.x)
    if s.kind == ELLIPTIC:
        return {
            "x_u": km * fr.n2, "y_u": zero, "n1_u": zero, "n2_u": km * fr.x,
            "x_y": a * fr.y, "y_y": -a * fr.x + k * fr.n1 + b * fr.n2,
            "n1_y": -k * fr.y, "n2_y": b * fr.y,
        }
    return {
        "x_u": -km * fr.n1, "y_u": zero, "n1_u": km * fr.x, "n2_u": zero,
        "x_y": a * fr.y, "y_y": -a * fr.x - b * fr.n1 - k * fr.n2,
        "n1_y": b * fr.y, "n2_y": -k * fr.y,
    }


def frame_equation_residuals(s: MeridianSurface, u, v, h: float = FRAME_RESIDUAL_STEP) -> Dict[str, float]:
    """
    Residuals of the eight frame derivative formulas.

    Keys are '<vector>_u' for d/du and '<vector>_y' for (1/f) d/dv; each
    value is the max-abs coordinate difference between a central
    difference and the predicted combination of frame vectors.
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    s.check_point(u, v, margin_u=h, margin_v=h)
    f = s.profile.f(u)[..., None]
    up, um = s.frame_arrays(u + h, v), s.frame_arrays(u - h, v)
    vp, vm = s.frame_arrays(u, v + h), s.frame_arrays(u, v - h)
    predictions = _frame_predictions(s, u, v)

    residuals = {}
    for name in ("x", "y", "n1", "n2"):
        d_u = (getattr(up, name) - getattr(um, name)) / (2 * h)
        d_y = (getattr(vp, name) - getattr(vm, name)) / (2 * h * f)
        residuals[f"{name}_u"] = float(np.max(np.abs(d_u - predictions[f"{name}_u"])))
        residuals[f"{name}_y"] = float(np.max(np.abs(d_y - predictions[f"{name}_y"])))
    return residuals
