#!/usr/bin/env python3
"""
Verification suites.

Each check builds its surfaces from fixed seeds, measures the relevant
defects and compares them against fixed thresholds. Suites group the
checks: harmonic, first, second, oracle, and all of them in order.

Run standalone with:  python verify_suites.py [suite]
"""

import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from classify import (E3, E31, FIRST_KIND, SECOND_KIND, SurfaceClassifier, developable_check,
                      first_kind_lambda, hyperplane_check, is_harmonic, lambda_ruled,
                      marginally_trapped_check, predicted_hyperplane, second_kind_extract,
                      second_kind_field)
from curves import ELLIPTIC, HYPERBOLIC
from errors import OdeError, SingularLambda
from laplacian_oracle import compare_laplacians, convergence_study, frame_equation_residuals, max_defect
from minkowski_algebra import wedge_array
from ode_solvers import FIRST_ELLIPTIC, FIRST_HYPERBOLIC, SECOND_ELLIPTIC, SECOND_HYPERBOLIC
from sample_surfaces import (constant_radius, linear_surface, ode_surface, plane,
                             polynomial_surface, product_surface, radial_line,
                             random_polynomial_surface)
from surface import make_grid

SEED = 20240611
ORACLE_SURFACES = 20
ORACLE_STEP = 1e-3
CONVERGENCE_STEP = 1e-2
ORDER_RANGE = (1.8, 2.2)
EXACT_TOL = 1e-8
TRAPPED_TOL = 1e-10
NONEXISTENCE_FLOOR = 1e-2
FRAME_TOL = 1e-6


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    defects: Dict[str, float] = field(default_factory=dict)
    message: str = ""
    seconds: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        out = {"name": self.name, "passed": self.passed, "defects": self.defects,
               "message": self.message}
        if timing:
            out["seconds"] = self.seconds
        return out


def _outcome(name: str, defects: Dict[str, Tuple[float, float, str]], message: str = "") -> CheckOutcome:
    """defects maps label -> (value, threshold, 'le' | 'ge')."""
    passed = True
    report = {}
    for label, (value, threshold, relation) in defects.items():
        ok = value <= threshold if relation == "le" else value >= threshold
        passed = passed and bool(ok)
        report[label] = float(value)
        report[f"{label}_threshold"] = float(threshold)
    return CheckOutcome(name=name, passed=passed, defects=report, message=message)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def fine_order_surfaces():
    """Strongly curved surfaces whose truncation error stays far above rounding at h = 1e-3."""
    return [polynomial_surface(ELLIPTIC, [0.5, 1.0], 0.5, 0.0, 3.0),
            constant_radius(0.5, 1, 0.0, 3.0)]


def check_oracle_agreement() -> CheckOutcome:
    """Closed-form Laplacian against finite differences on random surfaces."""
    rng = np.random.default_rng(SEED)
    worst, orders = 0.0, []
    for kind in (ELLIPTIC, HYPERBOLIC):
        for _ in range(ORACLE_SURFACES):
            s, _ = random_polynomial_surface(rng, kind)
            worst = max(worst, max_defect(compare_laplacians(s, make_grid(s), ORACLE_STEP)))
            orders.append(convergence_study(s, make_grid(s, 10, 10), CONVERGENCE_STEP).order)
    fine_orders = [convergence_study(s, make_grid(s, 10, 10), ORACLE_STEP).order
                   for s in fine_order_surfaces()]
    return _outcome("oracle_agreement", {
        "max_defect": (worst, 1e-4, "le"),
        "min_order": (min(orders), ORDER_RANGE[0], "ge"),
        "max_order": (max(orders), ORDER_RANGE[1], "le"),
        "min_order_fine_step": (min(fine_orders), ORDER_RANGE[0], "ge"),
        "max_order_fine_step": (max(fine_orders), ORDER_RANGE[1], "le"),
    }, f"{2 * ORACLE_SURFACES} surfaces, orders at h = {CONVERGENCE_STEP:g} and {ORACLE_STEP:g}")


def check_frame_equations() -> CheckOutcome:
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for kind in (ELLIPTIC, HYPERBOLIC):
        for _ in range(5):
            s, _ = random_polynomial_surface(rng, kind)
            u = rng.uniform(0.1, 0.9, 4)
            v = rng.uniform(0.1, 0.9, 4)
            worst = max(worst, max(frame_equation_residuals(s, u, v).values()))
    return _outcome("frame_equations", {"max_residual": (worst, FRAME_TOL, "le")})


def check_harmonic_planes() -> CheckOutcome:
    """Planes are harmonic; breaking any one hypothesis is not."""
    planes = [plane(f0) for f0 in (0.5, 1.0, 2.0)]
    plane_defect = max(is_harmonic(s, make_grid(s)).defect for s in planes)

    rng = np.random.default_rng(SEED + 2)
    violators = []
    for i in range(10):
        f0 = float(rng.uniform(0.5, 1.5))
        c = float(rng.uniform(0.3, 1.0))
        broken = i % 3
        if broken == 0:
            violators.append(linear_surface(ELLIPTIC, 1.0, f0, 0.0, 0.0, 3.0 * c))
        elif broken == 1:
            violators.append(polynomial_surface(ELLIPTIC, [c], f0, 0.0, 0.0))
        else:
            violators.append(polynomial_surface(ELLIPTIC, [0.0, c], f0, 0.0, 0.0))
    violator_defect = min(is_harmonic(s, make_grid(s, 20, 20)).defect for s in violators)
    return _outcome("harmonic_planes", {
        "plane_defect": (plane_defect, EXACT_TOL, "le"),
        "violator_min_defect": (violator_defect, 1e-3, "ge"),
    })


def check_harmonic_constant_radius() -> CheckOutcome:
    """Hyperbolic f = a, g = +-u + b, kappa = +-1: harmonic, marginally trapped, developable."""
    harmonic = trapped = developable = 0.0
    min_h = np.inf
    for a in (0.8, 1.5):
        for g_slope in (1, -1):
            for kappa in (1.0, -1.0):
                s = constant_radius(a, g_slope, 0.3, kappa)
                grid = make_grid(s, 20, 20)
                harmonic = max(harmonic, is_harmonic(s, grid).defect)
                mt = marginally_trapped_check(s, grid, TRAPPED_TOL)
                trapped = max(trapped, mt.defect)
                min_h = min(min_h, mt.detail["min_norm_h"])
                developable = max(developable, developable_check(s, grid).defect)
    return _outcome("harmonic_constant_radius", {
        "harmonic_defect": (harmonic, EXACT_TOL, "le"),
        "null_h_defect": (trapped, TRAPPED_TOL, "le"),
        "min_norm_h": (min_h, 1e-3, "ge"),
        "developable_defect": (developable, EXACT_TOL, "le"),
    })


def check_first_kind_anchor() -> CheckOutcome:
    """Hyperbolic a = 1, g = u, kappa = 2: lambda = -3 and a hyperplane of type E31."""
    s = constant_radius(1.0, 1, 0.0, 2.0)
    grid = make_grid(s, 20, 20)
    uu, vv = grid.mesh()
    lams = np.array([first_kind_lambda(s, u, v, EXACT_TOL) for u, v in zip(uu.ravel(), vv.ravel())],
                    dtype=float)
    lam_defect = float(np.max(np.abs(lams + 3.0))) if np.all(np.isfinite(lams)) else np.inf
    verdict = SurfaceClassifier().classify(s, grid)
    hp = hyperplane_check(s, grid, E31)
    return _outcome("first_kind_anchor", {
        "lambda_defect": (lam_defect, EXACT_TOL, "le"),
        "proportionality_residual": (verdict.proportionality_residual, EXACT_TOL, "le"),
        "hyperplane_defect": (hp.defect, EXACT_TOL, "le"),
        "theta_defect": (abs(hp.theta - 0.5 * np.log(3.0)), EXACT_TOL, "le"),
    }, f"category {verdict.category}, case {verdict.matched_case} ({verdict.case})")


def check_first_kind_ode() -> CheckOutcome:
    residual = c_defect = 0.0
    categories = []
    for case in (FIRST_ELLIPTIC, FIRST_HYPERBOLIC):
        s = ode_surface(case)
        verdict = SurfaceClassifier().classify(s, make_grid(s, 20, 20))
        categories.append(verdict.category)
        residual = max(residual, verdict.proportionality_residual)
        c_defect = max(c_defect, verdict.c_constancy_defect)
    wrong = sum(cat != FIRST_KIND for cat in categories)
    return _outcome("first_kind_ode", {
        "proportionality_residual": (residual, 1e-5, "le"),
        "c_defect": (c_defect, 1e-6, "le"),
        "misclassified": (float(wrong), 0.0, "le"),
    })


def case_one_bivector(s, uu, vv) -> np.ndarray:
    """-(1/(kappa^2 + 1)) (x ^ y + kappa f' y ^ n1) on a grid."""
    fr = s.frame_arrays(uu, vv)
    sc = s.scalars(uu, vv)
    k = sc.kappa[..., None]
    return -(wedge_array(fr.x, fr.y) + (k * sc.df[..., None]) * wedge_array(fr.y, fr.n1)) / (k * k + 1.0)


def check_second_kind_anchor() -> CheckOutcome:
    """Elliptic f = u + 1 on [0.5, 1.5], g = 0, kappa = 2: lambda = 5/f^2."""
    s = radial_line(2.0, offset=1.0, u_domain=(0.5, 1.5))
    grid = make_grid(s)
    uu, vv = grid.mesh()
    lam, c_field = second_kind_field(s, grid, lambda_ruled)
    f = s.profile.f(uu)
    _, constancy = second_kind_extract(s, grid, "ruled")
    return _outcome("second_kind_anchor", {
        "lambda_defect": (float(np.max(np.abs(lam * f * f - 5.0))), EXACT_TOL, "le"),
        "c_constancy_defect": (constancy, 1e-6, "le"),
        "c_closed_form_defect": (float(np.max(np.abs(c_field - case_one_bivector(s, uu, vv)))), 1e-6, "le"),
    })


def check_second_kind_ode() -> CheckOutcome:
    """kappa = 0 over profiles solving the second-kind equation: C constant and nonzero."""
    c_defect = 0.0
    c_size = np.inf
    categories = []
    for case in (SECOND_ELLIPTIC, SECOND_HYPERBOLIC):
        s = ode_surface(case)
        verdict = SurfaceClassifier().classify(s, make_grid(s, 20, 20))
        categories.append(verdict.category)
        c_defect = max(c_defect, verdict.c_constancy_defect)
        c_size = min(c_size, verdict.c_estimate.norm_inf())
    wrong = sum(cat != SECOND_KIND for cat in categories)
    return _outcome("second_kind_ode", {
        "c_constancy_defect": (c_defect, 1e-6, "le"),
        "min_c_norm": (c_size, 1e-3, "ge"),
        "misclassified": (float(wrong), 0.0, "le"),
    })


def check_trapped_and_hyperplanes() -> CheckOutcome:
    trapped = 0.0
    hyperplane = 0.0
    mismatched = 0
    for kind, c in ((ELLIPTIC, 0.5), (HYPERBOLIC, 0.6)):
        a, b = (np.cosh(c), np.sinh(c)) if kind == ELLIPTIC else (np.cos(c), np.sin(c))
        for sign in (1.0, -1.0):
            s = linear_surface(kind, a, 1.0, b, 0.0, sign * b)
            trapped = max(trapped, marginally_trapped_check(s, make_grid(s, 20, 20), TRAPPED_TOL).defect)
        for kappa in (2.0, 0.2, -2.0):
            s = linear_surface(kind, a, 1.0, b, 0.0, kappa)
            target = predicted_hyperplane(kind, kappa, b)
            verdict = SurfaceClassifier().classify(s, make_grid(s, 20, 20))
            result = verdict.side_properties[f"hyperplane_{target}"]
            other = verdict.side_properties[f"hyperplane_{E31 if target == E3 else E3}"]
            hyperplane = max(hyperplane, result.defect)
            mismatched += int(not result.flag or other.flag)
    return _outcome("trapped_and_hyperplanes", {
        "null_h_defect": (trapped, TRAPPED_TOL, "le"),
        "hyperplane_defect": (hyperplane, EXACT_TOL, "le"),
        "wrong_hyperplane_type": (float(mismatched), 0.0, "le"),
    })


NONEXISTENCE_DRAWS = 10
NONEXISTENCE_START = {ELLIPTIC: {"f0": 1.0, "phi0": 1.5}, HYPERBOLIC: {"f0": 1.0, "phi0": 1.5}}
NONEXISTENCE_KAPPA = (0.25, 2.5)
NONEXISTENCE_A = (0.25, 1.5)
# first draw of each kind has |kappa| > 1
NONEXISTENCE_STEEP_KAPPA = (1.25, 2.5)
DEGENERATE_GAP = 0.05
MAX_REDRAWS = 200


def product_lambda_numerator(kind: str, kappa: float, a: float) -> float:
    """f^2 lambda for f kappa_m = a; zero on the excluded sets a^2 = 1 + kappa^2 and a^2 = kappa^2 - 1."""
    if kind == ELLIPTIC:
        return 1.0 + kappa * kappa - a * a
    return 1.0 - kappa * kappa + a * a


def draw_product_surfaces(rng: np.random.Generator, kind: str, count: int = NONEXISTENCE_DRAWS):
    """
    Random admissible constant-product surfaces.

    A draw is redrawn when it sits on the degenerate set or when its
    profile does not exist on the whole u-domain.
    """
    start = NONEXISTENCE_START[kind]
    drawn = []
    for _ in range(MAX_REDRAWS):
        if len(drawn) == count:
            break
        kappa_range = NONEXISTENCE_STEEP_KAPPA if not drawn else NONEXISTENCE_KAPPA
        kappa = float(rng.choice([-1, 1]) * rng.uniform(*kappa_range))
        a = float(rng.choice([-1, 1]) * rng.uniform(*NONEXISTENCE_A))
        if abs(product_lambda_numerator(kind, kappa, a)) < DEGENERATE_GAP:
            continue
        try:
            s = product_surface(kind, start["f0"], start["phi0"], a, kappa)
        except OdeError:
            continue
        drawn.append((kappa, a, s))
    if len(drawn) < count:
        raise RuntimeError(f"only {len(drawn)} admissible {kind} draws after {MAX_REDRAWS} attempts")
    return drawn


def check_constant_product_nonexistence() -> CheckOutcome:
    """f kappa_m = a with constant kappa never yields a constant C."""
    rng = np.random.default_rng(SEED + 8)
    smallest = np.inf
    steep = 0
    for kind in (ELLIPTIC, HYPERBOLIC):
        for kappa, a, s in draw_product_surfaces(rng, kind):
            if kind == HYPERBOLIC and abs(kappa) > 1.0:
                steep += 1
            try:
                _, defect = second_kind_extract(s, make_grid(s, 20, 20), "constant_product")
            except SingularLambda:
                defect = np.inf
            smallest = min(smallest, defect)
    return _outcome("constant_product_nonexistence", {
        "min_c_constancy_defect": (smallest, NONEXISTENCE_FLOOR, "ge"),
        "hyperbolic_draws_above_unit_kappa": (float(steep), 1.0, "ge"),
    }, f"{2 * NONEXISTENCE_DRAWS} draws")


CHECKS: Dict[str, Callable[[], CheckOutcome]] = {
    "oracle_agreement": check_oracle_agreement,
    "harmonic_planes": check_harmonic_planes,
    "harmonic_constant_radius": check_harmonic_constant_radius,
    "first_kind_anchor": check_first_kind_anchor,
    "first_kind_ode": check_first_kind_ode,
    "second_kind_anchor": check_second_kind_anchor,
    "second_kind_ode": check_second_kind_ode,
    "trapped_and_hyperplanes": check_trapped_and_hyperplanes,
    "constant_product_nonexistence": check_constant_product_nonexistence,
    "frame_equations": check_frame_equations,
}

SUITES: Dict[str, List[str]] = {
    "harmonic": ["harmonic_planes", "harmonic_constant_radius"],
    "first": ["first_kind_anchor", "first_kind_ode"],
    "second": ["second_kind_anchor", "second_kind_ode", "trapped_and_hyperplanes",
               "constant_product_nonexistence"],
    "oracle": ["oracle_agreement", "frame_equations"],
}
SUITES["all"] = list(CHECKS)


def run_check(name: str) -> CheckOutcome:
    """Run one check; an exception counts as a failure."""
    start = time.perf_counter()
    try:
        outcome = CHECKS[name]()
    except Exception as e:
        outcome = CheckOutcome(name=name, passed=False, message=f"{type(e).__name__}: {e}")
    outcome.seconds = time.perf_counter() - start
    return outcome


def run_suite(suite: str = "all", jobs: int = 1) -> List[CheckOutcome]:
    """Results come back in suite order whatever the worker count."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    names = SUITES[suite]
    if jobs <= 1:
        return [run_check(name) for name in names]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_check, names))


def print_summary(suite: str, outcomes: List[CheckOutcome], stream=None) -> None:
    stream = stream or sys.stderr
    print(f"Running verification suite '{suite}'...", file=stream)
    print("=" * 50, file=stream)
    for outcome in outcomes:
        print(f"\n[{outcome.name}]", file=stream)
        mark = "✓" if outcome.passed else "✗"
        for label, value in outcome.defects.items():
            if not label.endswith("_threshold"):
                print(f"  {mark} {label} = {value:.3e} (threshold {outcome.defects[label + '_threshold']:.1e})",
                      file=stream)
        if outcome.message:
            print(f"  {outcome.message}", file=stream)

    print("\n" + "=" * 50, file=stream)
    print("Summary:", file=stream)
    for outcome in outcomes:
        status = "✓ PASS" if outcome.passed else "✗ FAIL"
        print(f"  {status}: {outcome.name}", file=stream)
    if all(o.passed for o in outcomes):
        print("\n✓ All checks passed!", file=stream)
    else:
        print("\n✗ Some checks failed. See the defects above.", file=stream)


def summary_dict(suite: str, outcomes: List[CheckOutcome], timing: bool = True) -> dict:
    return {"suite": suite, "passed": all(o.passed for o in outcomes),
            "checks": [o.to_dict(timing) for o in outcomes]}


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    suite = argv[0] if argv else "all"
    outcomes = run_suite(suite)
    print_summary(suite, outcomes)
    return 0 if all(o.passed for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
