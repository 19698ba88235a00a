"""
Classification Module

Places a meridian surface in the taxonomy harmonic / first kind /
second kind / none for the Gauss map equation Delta G = lambda (G + C),
extracts lambda and C, and checks the geometric side properties
(marginally trapped, developable, containment in a hyperplane).

The matched case is reported twice: `case` is "<kind>:<case>" with case one
of plane, constant_radius, zero_curvature_ode, radial_line, straight_line,
constant_product, general; `matched_case` is the classification tag from
CASE_TAGS, None for cases the classification does not list.
"""

import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from curves import ELLIPTIC, HYPERBOLIC
from errors import ConfigError, RegimeError, SingularLambda
from minkowski_algebra import Bivector, inner4_array, inner_biv_array
from reports import load_json
from surface import MeridianSurface, SurfaceGrid

HARMONIC = "harmonic"
FIRST_KIND = "first_kind"
SECOND_KIND = "second_kind"
NONE = "none"
CATEGORIES = (HARMONIC, FIRST_KIND, SECOND_KIND, NONE)

E3 = "E3"
E31 = "E31"
DEVELOPABLE_STEP = 1e-4

CASE_TAGS: Dict[Tuple[str, str, str], str] = {
    (ELLIPTIC, HARMONIC, "plane"): "Thm 4.1",
    (HYPERBOLIC, HARMONIC, "plane"): "Thm 4.2(i)",
    (HYPERBOLIC, HARMONIC, "constant_radius"): "Thm 4.2(ii)",
    (ELLIPTIC, FIRST_KIND, "zero_curvature_ode"): "Thm 5.1",
    (HYPERBOLIC, FIRST_KIND, "zero_curvature_ode"): "Thm 5.2(i)",
    (HYPERBOLIC, FIRST_KIND, "constant_radius"): "Thm 5.2(ii)",
    (ELLIPTIC, SECOND_KIND, "radial_line"): "Thm 6.1(i)",
    (ELLIPTIC, SECOND_KIND, "straight_line"): "Thm 6.1(ii)",
    (ELLIPTIC, SECOND_KIND, "zero_curvature_ode"): "Thm 6.1(iii)",
    (HYPERBOLIC, SECOND_KIND, "radial_line"): "Thm 6.2(i)",
    (HYPERBOLIC, SECOND_KIND, "straight_line"): "Thm 6.2(ii)",
    (HYPERBOLIC, SECOND_KIND, "zero_curvature_ode"): "Thm 6.2(iii)",
}


@dataclass
class Tolerances:
    """Tolerance ladder; every field can be overridden from a JSON file."""

    harmonic: float = 1e-6
    proportionality: float = 1e-5
    c_constancy: float = 1e-6
    side_property: float = 1e-6
    case_detection: float = 1e-6
    lambda_floor: float = 1e-6
    oracle: float = 1e-4
    fd_step: float = 1e-3

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: Optional[str] = None) -> "Tolerances":
        if not isinstance(data, dict):
            raise ConfigError(f"tolerance file {source or '<inline>'} must hold a JSON object")
        known = {f.name for f in fields(cls)}
        values = {}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown tolerance (expected one of {sorted(known)})", field=key)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(f"tolerance must be a positive number, got {value!r}", field=key)
            values[key] = float(value)
        return cls(**values)

    @classmethod
    def load(cls, path: str) -> "Tolerances":
        if not os.path.exists(path):
            raise FileNotFoundError(f"Tolerance file not found: {path}")
        return cls.from_dict(load_json(path), source=path)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a predicate together with its numerical defect."""

    flag: bool
    defect: float
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"flag": self.flag, "defect": self.defect, **self.detail}


@dataclass(frozen=True)
class HyperplaneResult(CheckResult):
    target: str = E3
    theta: float = 0.0

    def to_dict(self) -> dict:
        out = super().to_dict()
        out.update({"target": self.target, "theta": self.theta})
        return out


# ---------------------------------------------------------------------------
# lambda formulas
# ---------------------------------------------------------------------------

def lambda_ruled(s: MeridianSurface, u, v) -> np.ndarray:
    """Straight profile (kappa_m = 0): (1 + kappa^2)/f^2 or (1 - kappa^2)/f^2."""
    sc = s.scalars(u, v)
    sign = 1.0 if s.kind == ELLIPTIC else -1.0
    return (1.0 + sign * sc.kappa ** 2) / sc.f ** 2


def lambda_general(s: MeridianSurface, u, v) -> np.ndarray:
    """Any profile with g' != 0."""
    sc = s.scalars(u, v)
    fkm2 = (sc.f * sc.kappa_m) ** 2
    if s.kind == ELLIPTIC:
        core = 1.0 + sc.kappa ** 2 - fkm2
    else:
        core = 1.0 - sc.kappa ** 2 + fkm2
    return (sc.dg * core - sc.f * sc.df * sc.d_f_kappa_m) / (sc.dg * sc.f ** 2)


def lambda_zero_curvature(s: MeridianSurface, u, v) -> np.ndarray:
    """kappa = 0: (g'(1 -+ f^2 kappa_m^2) - f f' (f kappa_m)') / (g' f^2)."""
    sc = s.scalars(u, v)
    sign = -1.0 if s.kind == ELLIPTIC else 1.0
    core = 1.0 + sign * (sc.f * sc.kappa_m) ** 2
    return (sc.dg * core - sc.f * sc.df * sc.d_f_kappa_m) / (sc.dg * sc.f ** 2)


def lambda_constant_product(s: MeridianSurface, u, v) -> np.ndarray:
    """kappa constant and f kappa_m = a constant."""
    sc = s.scalars(u, v)
    a2 = (sc.f * sc.kappa_m) ** 2
    if s.kind == ELLIPTIC:
        return (1.0 + sc.kappa ** 2 - a2) / sc.f ** 2
    return (1.0 - sc.kappa ** 2 + a2) / sc.f ** 2


LAMBDA_FORMULAS: Dict[str, Callable] = {
    "ruled": lambda_ruled,
    "zero_curvature": lambda_zero_curvature,
    "constant_product": lambda_constant_product,
    "general": lambda_general,
}

LambdaFormula = Union[str, Callable]


def _resolve_formula(formula: LambdaFormula) -> Callable:
    if callable(formula):
        return formula
    try:
        return LAMBDA_FORMULAS[formula]
    except KeyError:
        raise ValueError(f"unknown lambda formula {formula!r}; expected one of {sorted(LAMBDA_FORMULAS)}")


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

def is_harmonic(s: MeridianSurface, grid: SurfaceGrid, tol: float = 1e-6) -> CheckResult:
    """Harmonic iff max ||Delta G||_inf over the grid is at most tol."""
    uu, vv = grid.mesh()
    defect = float(np.max(np.abs(s.laplacian_closed_array(uu, vv))))
    return CheckResult(flag=defect <= tol, defect=defect)


def _first_kind_arrays(lap: np.ndarray, gauss: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lam = inner_biv_array(lap, gauss)
    residual = np.max(np.abs(lap - lam[..., None] * gauss), axis=-1)
    return lam, residual


def first_kind_lambda(s: MeridianSurface, u: float, v: float, tol: float = 1e-5) -> Optional[float]:
    """
    lambda = <Delta G, G> when Delta G = lambda G holds at the point.

    Returns:
        lambda, or None when the residual exceeds tol or |lambda| <= tol
    """
    lam, residual = _first_kind_arrays(s.laplacian_closed_array(u, v), s.gauss_map_array(u, v))
    lam, residual = float(lam), float(residual)
    if residual <= tol and abs(lam) > tol:
        return lam
    return None


def second_kind_field(s: MeridianSurface, grid: SurfaceGrid, lambda_formula: LambdaFormula,
                      tol: float = 1e-6) -> Tuple[np.ndarray, np.ndarray]:
    """
    lambda and C = Delta G / lambda - G on the grid, C in ambient coordinates.

    Raises:
        SingularLambda: If |lambda| < tol (or is not finite) anywhere
    """
    uu, vv = grid.mesh()
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.asarray(_resolve_formula(lambda_formula)(s, uu, vv), dtype=float)
    if not np.all(np.isfinite(lam)) or np.min(np.abs(lam)) < tol:
        raise SingularLambda(f"lambda vanishes on the grid (min |lambda| = {np.nanmin(np.abs(lam)):.3g})")
    c_field = s.laplacian_closed_array(uu, vv) / lam[..., None] - s.gauss_map_array(uu, vv)
    return lam, c_field


def second_kind_extract(s: MeridianSurface, grid: SurfaceGrid, lambda_formula: LambdaFormula,
                        tol: float = 1e-6) -> Tuple[Bivector, float]:
    """
    Estimate the constant bivector C.

    Returns:
        (grid mean of C, max-abs coordinate deviation from that mean)
    """
    _, c_field = second_kind_field(s, grid, lambda_formula, tol)
    flat = c_field.reshape(-1, 6)
    mean = flat.mean(axis=0)
    return Bivector.from_array(mean), float(np.max(np.abs(flat - mean)))


def marginally_trapped_check(s: MeridianSurface, grid: SurfaceGrid, tol: float = 1e-6) -> CheckResult:
    """H != 0 and <H, H> = 0 over the grid."""
    uu, vv = grid.mesh()
    h = s.mean_curvature_array(uu, vv)
    defect = float(np.max(np.abs(inner4_array(h, h))))
    min_norm = float(np.min(np.max(np.abs(h), axis=-1)))
    return CheckResult(flag=defect <= tol and min_norm > tol, defect=defect,
                       detail={"min_norm_h": min_norm})


def developable_check(s: MeridianSurface, grid: SurfaceGrid, tol: float = 1e-6,
                      h: float = DEVELOPABLE_STEP) -> CheckResult:
    """
    Normal space constant along the rulings (d n1/du = d n2/du = 0).

    Only straight profiles qualify; any other profile fails immediately.
    """
    uu, vv = grid.mesh()
    km = float(np.max(np.abs(s.profile.kappa_m(uu))))
    if km > tol:
        return CheckResult(flag=False, defect=km, detail={"reason": "profile is not a straight line"})
    up, um = s.frame_arrays(uu + h, vv), s.frame_arrays(uu - h, vv)
    d1 = np.max(np.abs(up.n1 - um.n1)) / (2 * h)
    d2 = np.max(np.abs(up.n2 - um.n2)) / (2 * h)
    defect = float(max(d1, d2))
    return CheckResult(flag=defect <= tol, defect=defect)


def predicted_hyperplane(kind: str, kappa: float, b: float, tol: float = 1e-6) -> Optional[str]:
    """Hyperplane type containing a straight-profile surface, None when kappa^2 = b^2."""
    gap = kappa * kappa - b * b
    if abs(gap) <= tol:
        return None
    if kind == ELLIPTIC:
        return E3 if gap > 0 else E31
    return E31 if gap > 0 else E3


def hyperplane_angle(kind: str, target: str, kappa: float, b: float) -> float:
    """
    Constant rotation angle of the normal frame.

    Raises:
        RegimeError: If the logarithm argument is not a positive finite number
    """
    if target not in (E3, E31):
        raise ValueError(f"hyperplane target must be {E3!r} or {E31!r}, got {target!r}")
    kappa_first = (kind == ELLIPTIC) == (target == E3)
    num, den = (kappa + b, kappa - b) if kappa_first else (b + kappa, b - kappa)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.float64(num) / np.float64(den)
    if not np.isfinite(arg) or arg <= 0:
        raise RegimeError(f"log argument {num:.6g}/{den:.6g} is not positive for {kind} {target}")
    return float(0.5 * np.log(arg))


def hyperplane_check(s: MeridianSurface, grid: SurfaceGrid, kind_target: str,
                     tol: float = 1e-6) -> HyperplaneResult:
    """
    Containment in a constant hyperplane of type E3 or E31.

    The normal frame is rotated by the case angle; the designated normal
    (n_perp for E3, n for E31) must be constant over the grid and the
    surface must stay orthogonal to it.
    """
    uu, vv = grid.mesh()
    sc = s.scalars(uu, vv)
    kappa, b = float(np.mean(sc.kappa)), float(np.mean(sc.dg))
    theta = hyperplane_angle(s.kind, kind_target, kappa, b)
    n, n_perp = s.normal_rotation_array(uu, vv, theta)
    normal = (n_perp if kind_target == E3 else n).reshape(-1, 4)
    mean = normal.mean(axis=0)
    normal_defect = float(np.max(np.abs(normal - mean)))
    z = s.immersion_array(uu, vv).reshape(-1, 4)
    offset_defect = float(np.max(np.abs(inner4_array(z - z[0], mean))))
    defect = max(normal_defect, offset_defect)
    return HyperplaneResult(flag=defect <= tol, defect=defect, target=kind_target, theta=theta,
                            detail={"normal_defect": normal_defect, "offset_defect": offset_defect})


# ---------------------------------------------------------------------------
# classifier
# ---------------------------------------------------------------------------

@dataclass
class ClassificationVerdict:
    """Result of classify_surface; to_dict() is the JSON form."""

    kind: str
    category: str
    matched_case: Optional[str]
    case: Optional[str]
    lambda_samples: np.ndarray
    lambda_formula: Optional[str]
    c_estimate: Bivector
    c_constancy_defect: float
    harmonic_defect: float
    proportionality_residual: float
    side_properties: Dict[str, CheckResult]
    case_features: Dict[str, bool]
    tolerances: Tolerances
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "category": self.category,
            "matched_case": self.matched_case,
            "case": self.case,
            "lambda_formula": self.lambda_formula,
            "lambda_samples": [[float(x) for x in row] for row in self.lambda_samples],
            "c_estimate": self.c_estimate.to_dict(),
            "c_constancy_defect": {"value": self.c_constancy_defect,
                                   "tolerance": self.tolerances.c_constancy},
            "harmonic_defect": {"value": self.harmonic_defect,
                                "tolerance": self.tolerances.harmonic},
            "proportionality_residual": {"value": self.proportionality_residual,
                                         "tolerance": self.tolerances.proportionality},
            "side_properties": {name: {**res.to_dict(), "tolerance": self.tolerances.side_property}
                                for name, res in self.side_properties.items()},
            "case_features": dict(self.case_features),
            "diagnostics": self.diagnostics,
            "tolerances": self.tolerances.to_dict(),
        }


class SurfaceClassifier:
    """
    Runs the predicate chain harmonic -> first kind -> second kind.

    Ties resolve to the earliest category in the chain.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        self.tolerances = tolerances or Tolerances()

    def detect_case_features(self, s: MeridianSurface, grid: SurfaceGrid) -> Dict[str, bool]:
        tol = self.tolerances.case_detection
        uu, vv = grid.mesh()
        sc = s.scalars(uu, vv)
        fkm = sc.f * sc.kappa_m

        def flat(values):
            return float(np.max(np.abs(values - np.mean(values)))) <= tol

        return {
            "kappa_constant": flat(sc.kappa),
            "kappa_zero": float(np.max(np.abs(sc.kappa))) <= tol,
            "kappa_m_zero": float(np.max(np.abs(sc.kappa_m))) <= tol,
            "slope_zero": float(np.max(np.abs(sc.dg))) <= tol,
            "slope_nonvanishing": float(np.min(np.abs(sc.dg))) > tol,
            "radius_constant": float(np.max(np.abs(sc.df))) <= tol,
            "f_kappa_m_constant": flat(fkm),
        }

    @staticmethod
    def _tags(kind: str, category: str, case: Optional[str]) -> Dict[str, Optional[str]]:
        if not case:
            return {"case": None, "matched_case": None}
        return {"case": f"{kind}:{case}", "matched_case": CASE_TAGS.get((kind, category, case))}

    def _harmonic_case(self, s: MeridianSurface, features: Dict[str, bool]) -> Optional[str]:
        if features["kappa_zero"] and features["kappa_m_zero"] and features["slope_zero"]:
            return "plane"
        if s.kind != ELLIPTIC and features["radius_constant"]:
            return "constant_radius"
        return None

    def _first_kind_case(self, features: Dict[str, bool]) -> Optional[str]:
        if features["radius_constant"] and not features["kappa_zero"]:
            return "constant_radius"
        if features["kappa_zero"]:
            return "zero_curvature_ode"
        return None

    def _second_kind_candidates(self, features: Dict[str, bool]) -> List[Tuple[str, str]]:
        """Applicable lambda formulas in catalogue order; general comes last."""
        candidates = []
        if features["kappa_m_zero"]:
            candidates.append(("ruled", "radial_line" if features["slope_zero"] else "straight_line"))
        if features["kappa_zero"] and features["slope_nonvanishing"]:
            candidates.append(("zero_curvature", "zero_curvature_ode"))
        if (features["kappa_constant"] and not features["kappa_zero"]
                and features["f_kappa_m_constant"] and not features["kappa_m_zero"]
                and features["slope_nonvanishing"]):
            candidates.append(("constant_product", "constant_product"))
        if features["slope_nonvanishing"]:
            candidates.append(("general", "general"))
        return candidates

    def side_properties(self, s: MeridianSurface, grid: SurfaceGrid,
                        features: Dict[str, bool]) -> Dict[str, CheckResult]:
        tol = self.tolerances.side_property
        props = {
            "marginally_trapped": marginally_trapped_check(s, grid, tol),
            "developable": developable_check(s, grid, tol),
        }
        skipped = {E3: CheckResult(False, 0.0, {"reason": "not checked"}),
                   E31: CheckResult(False, 0.0, {"reason": "not checked"})}
        if features["kappa_constant"] and features["kappa_m_zero"]:
            uu, vv = grid.mesh()
            sc = s.scalars(uu, vv)
            target = predicted_hyperplane(s.kind, float(np.mean(sc.kappa)), float(np.mean(sc.dg)),
                                          self.tolerances.case_detection)
            if target is None:
                reason = "kappa^2 = b^2 (marginally trapped regime)"
                skipped = {key: CheckResult(False, 0.0, {"reason": reason}) for key in skipped}
            else:
                try:
                    skipped[target] = hyperplane_check(s, grid, target, tol)
                except RegimeError as exc:
                    skipped[target] = CheckResult(False, 0.0, {"reason": str(exc)})
        props["hyperplane_E3"] = skipped[E3]
        props["hyperplane_E31"] = skipped[E31]
        return props

    def classify(self, s: MeridianSurface, grid: SurfaceGrid) -> ClassificationVerdict:
        tol = self.tolerances
        uu, vv = grid.mesh()
        features = self.detect_case_features(s, grid)
        lap = s.laplacian_closed_array(uu, vv)
        gauss = s.gauss_map_array(uu, vv)
        diagnostics: Dict[str, Any] = {}

        harmonic_defect = float(np.max(np.abs(lap)))
        lam, residual = _first_kind_arrays(lap, gauss)
        proportionality = float(np.max(residual))
        empty = np.zeros((0, 3))

        verdict = dict(kind=s.kind, category=NONE, matched_case=None, case=None, lambda_samples=empty,
                       lambda_formula=None, c_estimate=Bivector.zero(),
                       c_constancy_defect=float("nan"), harmonic_defect=harmonic_defect,
                       proportionality_residual=proportionality)

        if harmonic_defect <= tol.harmonic:
            verdict.update(category=HARMONIC, c_constancy_defect=0.0,
                           **self._tags(s.kind, HARMONIC, self._harmonic_case(s, features)))
        elif proportionality <= tol.proportionality and float(np.min(np.abs(lam))) > tol.lambda_floor:
            c_field = lap / lam[..., None] - gauss
            verdict.update(category=FIRST_KIND,
                           **self._tags(s.kind, FIRST_KIND, self._first_kind_case(features)),
                           lambda_samples=np.column_stack([uu.ravel(), vv.ravel(), lam.ravel()]),
                           lambda_formula="projection",
                           c_estimate=Bivector.from_array(c_field.reshape(-1, 6).mean(axis=0)),
                           c_constancy_defect=float(np.max(np.abs(c_field))))
        else:
            attempts = {}
            best, matched = None, None
            for formula, case in self._second_kind_candidates(features):
                try:
                    lam2, c_field = second_kind_field(s, grid, formula, tol.lambda_floor)
                except SingularLambda as exc:
                    attempts[formula] = {"error": str(exc)}
                    continue
                flat = c_field.reshape(-1, 6)
                mean = flat.mean(axis=0)
                defect = float(np.max(np.abs(flat - mean)))
                attempts[formula] = {"c_constancy_defect": defect}
                attempt = (defect, formula, case, lam2, mean)
                if best is None or defect < best[0]:
                    best = attempt
                if (matched is None and defect <= tol.c_constancy
                        and float(np.max(np.abs(mean))) > tol.c_constancy):
                    matched = attempt
            diagnostics["second_kind_attempts"] = attempts
            if matched is not None:
                defect, formula, case, lam2, mean = matched
                verdict.update(category=SECOND_KIND, **self._tags(s.kind, SECOND_KIND, case),
                               lambda_samples=np.column_stack([uu.ravel(), vv.ravel(), lam2.ravel()]),
                               c_estimate=Bivector.from_array(mean), c_constancy_defect=defect,
                               lambda_formula=formula)
            elif best is not None:
                defect, formula, _, _, mean = best
                verdict.update(c_estimate=Bivector.from_array(mean), c_constancy_defect=defect,
                               lambda_formula=formula)

        return ClassificationVerdict(side_properties=self.side_properties(s, grid, features),
                                     case_features=features, tolerances=tol,
                                     diagnostics=diagnostics, **verdict)


def classify_surface(s: MeridianSurface, grid: SurfaceGrid,
                     tolerances: Optional[Tolerances] = None) -> ClassificationVerdict:
    return SurfaceClassifier(tolerances).classify(s, grid)
