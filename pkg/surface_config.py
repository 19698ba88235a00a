"""
Surface configuration files.

A config is a JSON object with "schema": 1 describing one meridian
surface and the grid it is evaluated on:

    {
      "schema": 1,
      "kind": "hyperbolic",
      "profile": {"type": "constant_f", "a": 1.0, "g_slope": 1, "b": 0.0},
      "base": {"kappa": 2.0, "v_domain": [0, 1]},
      "u_domain": [0, 1],
      "grid": {"nu": 50, "nv": 50, "margin": 0.05}
    }

Profile types: slope_angle_polynomial {coeffs, f0, g0, u0},
constant_f {a, g_slope, b} (hyperbolic only), linear {a, a1, b, b1} and
ode_solution {case, params, step}. The base curvature is a number or
{"polynomial": [c0, c1, ...]} in v.
"""

import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from classify import Tolerances
from curves import DEFAULT_FRENET_STEP, KINDS
from errors import ConfigError, DomainError, FrameError
from ode_solvers import CASES, DEFAULT_ODE_STEP, case_kind
from reports import load_json
from sample_surfaces import (base_curve, constant_radius, linear_surface, ode_surface,
                             polynomial_surface)
from surface import MeridianSurface, SurfaceGrid, make_grid, make_surface

SCHEMA_VERSION = 1
TOLERANCE_ENV = "MERIDIAN_LAB_TOL"
PROFILE_TYPES = ("slope_angle_polynomial", "constant_f", "linear", "ode_solution")


@dataclass(frozen=True)
class GridSpec:
    nu: int = 50
    nv: int = 50
    margin: float = 0.05


@dataclass(frozen=True)
class SurfaceConfig:
    kind: str
    profile: Dict[str, Any]
    base: Dict[str, Any]
    u_domain: Tuple[float, float] = (0.0, 1.0)
    grid: GridSpec = field(default_factory=GridSpec)
    source: Optional[str] = None

    def to_dict(self) -> dict:
        """Normalised config echo (defaults filled in)."""
        return {
            "schema": SCHEMA_VERSION,
            "kind": self.kind,
            "profile": self.profile,
            "base": self.base,
            "u_domain": list(self.u_domain),
            "grid": asdict(self.grid),
        }


# ---------------------------------------------------------------------------
# field readers
# ---------------------------------------------------------------------------

def _object(value: Any, path: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError("expected a JSON object", field=path)
    return value


def _require(data: Dict[str, Any], key: str, path: str) -> Any:
    if key not in data:
        raise ConfigError("missing required field", field=f"{path}.{key}" if path else key)
    return data[key]


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=path)
    return float(value)


def _integer(value: Any, path: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"expected an integer >= {minimum}, got {value!r}", field=path)
    return value


def _numbers(value: Any, path: str, length: Optional[int] = None) -> List[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of numbers", field=path)
    if length is not None and len(value) != length:
        raise ConfigError(f"expected {length} numbers, got {len(value)}", field=path)
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _interval(value: Any, path: str) -> Tuple[float, float]:
    a, b = _numbers(value, path, length=2)
    if a >= b:
        raise ConfigError(f"interval start must be below its end, got [{a}, {b}]", field=path)
    return a, b


def _check_keys(data: Dict[str, Any], allowed: Tuple[str, ...], path: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown field (expected one of {list(allowed)})",
                              field=f"{path}.{key}" if path else key)


# ---------------------------------------------------------------------------
# normalisation
# ---------------------------------------------------------------------------

def _normalize_profile(data: Any, kind: str) -> Dict[str, Any]:
    data = _object(data, "profile")
    ptype = _require(data, "type", "profile")
    if ptype not in PROFILE_TYPES:
        raise ConfigError(f"unknown profile type {ptype!r} (expected one of {list(PROFILE_TYPES)})",
                          field="profile.type")

    if ptype == "slope_angle_polynomial":
        _check_keys(data, ("type", "coeffs", "f0", "g0", "u0"), "profile")
        out = {"type": ptype,
               "coeffs": _numbers(_require(data, "coeffs", "profile"), "profile.coeffs"),
               "f0": _number(_require(data, "f0", "profile"), "profile.f0"),
               "g0": _number(data.get("g0", 0.0), "profile.g0")}
        if data.get("u0") is not None:
            out["u0"] = _number(data["u0"], "profile.u0")
        return out

    if ptype == "constant_f":
        _check_keys(data, ("type", "a", "g_slope", "b"), "profile")
        if kind != "hyperbolic":
            raise ConfigError("constant_f profiles exist only for the hyperbolic kind", field="profile.type")
        slope = _number(_require(data, "g_slope", "profile"), "profile.g_slope")
        if slope not in (1.0, -1.0):
            raise ConfigError(f"g_slope must be 1 or -1, got {slope:g}", field="profile.g_slope")
        return {"type": ptype, "a": _number(_require(data, "a", "profile"), "profile.a"),
                "g_slope": int(slope), "b": _number(data.get("b", 0.0), "profile.b")}

    if ptype == "linear":
        _check_keys(data, ("type", "a", "a1", "b", "b1"), "profile")
        return {"type": ptype, **{key: _number(_require(data, key, "profile"), f"profile.{key}")
                                  for key in ("a", "a1", "b", "b1")}}

    _check_keys(data, ("type", "case", "params", "step"), "profile")
    case = _require(data, "case", "profile")
    if case not in CASES:
        raise ConfigError(f"unknown ODE case {case!r} (expected one of {list(CASES)})", field="profile.case")
    if case_kind(case) != kind:
        raise ConfigError(f"case {case} does not match kind {kind}", field="profile.case")
    params = _object(data.get("params", {}), "profile.params")
    return {"type": ptype, "case": case,
            "params": {k: _number(v, f"profile.params.{k}") for k, v in params.items()},
            "step": _number(data.get("step", DEFAULT_ODE_STEP), "profile.step")}


def _normalize_kappa(value: Any) -> Any:
    if isinstance(value, dict):
        _check_keys(value, ("polynomial",), "base.kappa")
        return {"polynomial": _numbers(_require(value, "polynomial", "base.kappa"),
                                       "base.kappa.polynomial")}
    return _number(value, "base.kappa")


def _normalize_base(data: Any) -> Dict[str, Any]:
    data = _object(data, "base")
    _check_keys(data, ("kappa", "initial_frame", "v_domain", "step"), "base")
    out = {"kappa": _normalize_kappa(_require(data, "kappa", "base")),
           "v_domain": list(_interval(data.get("v_domain", [0.0, 1.0]), "base.v_domain")),
           "step": _number(data.get("step", DEFAULT_FRENET_STEP), "base.step")}
    if out["step"] <= 0:
        raise ConfigError("step must be positive", field="base.step")
    frame = data.get("initial_frame")
    if frame is not None:
        if not isinstance(frame, list) or len(frame) != 3:
            raise ConfigError("expected three 3-vectors (l0, t0, n0)", field="base.initial_frame")
        out["initial_frame"] = [_numbers(vec, f"base.initial_frame[{i}]", length=3)
                                for i, vec in enumerate(frame)]
    return out


def _normalize_grid(data: Any) -> GridSpec:
    data = _object(data, "grid")
    _check_keys(data, ("nu", "nv", "margin"), "grid")
    defaults = GridSpec()
    margin = _number(data.get("margin", defaults.margin), "grid.margin")
    if margin < 0:
        raise ConfigError("margin must be non-negative", field="grid.margin")
    return GridSpec(nu=_integer(data.get("nu", defaults.nu), "grid.nu"),
                    nv=_integer(data.get("nv", defaults.nv), "grid.nv"),
                    margin=margin)


def parse_config(data: Any, source: Optional[str] = None) -> SurfaceConfig:
    """
    Validate a decoded config and fill in defaults.

    Raises:
        ConfigError: With the dotted path of the offending field
    """
    data = _object(data, "")
    _check_keys(data, ("schema", "kind", "profile", "base", "u_domain", "grid"), "")
    schema = _require(data, "schema", "")
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema {schema!r} (expected {SCHEMA_VERSION})", field="schema")
    kind = _require(data, "kind", "")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {list(KINDS)}, got {kind!r}", field="kind")
    return SurfaceConfig(kind=kind,
                         profile=_normalize_profile(_require(data, "profile", ""), kind),
                         base=_normalize_base(_require(data, "base", "")),
                         u_domain=_interval(data.get("u_domain", [0.0, 1.0]), "u_domain"),
                         grid=_normalize_grid(data.get("grid", {})),
                         source=source)


def load_config(path: str) -> SurfaceConfig:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    return parse_config(load_json(path), source=path)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _kappa_spec(kappa: Any):
    return kappa["polynomial"] if isinstance(kappa, dict) else kappa


def build_surface(config: SurfaceConfig) -> MeridianSurface:
    """
    Construct the configured surface.

    Raises:
        ConfigError: If the profile or base data describe no valid surface
        OdeError: If an ode_solution profile fails to integrate
    """
    prof, base = config.profile, config.base
    kappa = _kappa_spec(base["kappa"])
    v_domain = tuple(base["v_domain"])
    ptype = prof["type"]
    try:
        if ptype == "ode_solution":
            surface = ode_surface(prof["case"], prof["params"], kappa, u_span=config.u_domain,
                                  step=prof["step"], v_domain=v_domain)
        elif ptype == "constant_f":
            surface = constant_radius(prof["a"], prof["g_slope"], prof["b"], kappa,
                                      u_domain=config.u_domain, v_domain=v_domain)
        elif ptype == "linear":
            surface = linear_surface(config.kind, prof["a"], prof["a1"], prof["b"], prof["b1"],
                                     kappa, u_domain=config.u_domain, v_domain=v_domain)
        else:
            surface = polynomial_surface(config.kind, prof["coeffs"], prof["f0"], prof["g0"], kappa,
                                         u_domain=config.u_domain, v_domain=v_domain,
                                         u0=prof.get("u0"))
    except DomainError as exc:
        raise ConfigError(str(exc), field="profile") from exc

    if "initial_frame" in base or base["step"] != DEFAULT_FRENET_STEP:
        curve = base_curve(config.kind, kappa, v_domain, base.get("initial_frame"), base["step"])
        try:
            surface = make_surface(surface.profile, curve)
        except FrameError as exc:
            raise ConfigError(str(exc), field="base.initial_frame") from exc
    return surface


def build_grid(config: SurfaceConfig, surface: MeridianSurface) -> SurfaceGrid:
    try:
        return make_grid(surface, config.grid.nu, config.grid.nv, config.grid.margin)
    except ValueError as exc:
        raise ConfigError(str(exc), field="grid.margin") from exc


def resolve_tolerances(tol_file: Optional[str] = None,
                       environ: Optional[Dict[str, str]] = None) -> Tolerances:
    """Tolerance ladder from --tol-file, else $MERIDIAN_LAB_TOL, else defaults."""
    environ = os.environ if environ is None else environ
    path = tol_file or environ.get(TOLERANCE_ENV)
    return Tolerances.load(path) if path else Tolerances()
