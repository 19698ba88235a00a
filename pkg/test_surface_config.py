"""Tests for config parsing, surface construction and report writers."""

import json

import numpy as np
import pytest

from classify import Tolerances
from curves import HYPERBOLIC
from errors import ConfigError
from reports import csv_text, dumps_json, load_json, read_csv, to_plain
from surface_config import (TOLERANCE_ENV, GridSpec, build_grid, build_surface, load_config,
                            parse_config, resolve_tolerances)

ANCHOR = {
    "schema": 1,
    "kind": "hyperbolic",
    "profile": {"type": "constant_f", "a": 1.0, "g_slope": 1, "b": 0.0},
    "base": {"kappa": 2.0},
}


def with_changes(**changes):
    data = json.loads(json.dumps(ANCHOR))
    data.update(changes)
    return data


def test_defaults_are_filled_in():
    config = parse_config(ANCHOR)
    assert config.kind == HYPERBOLIC
    assert config.u_domain == (0.0, 1.0)
    assert config.grid == GridSpec()
    assert config.base == {"kappa": 2.0, "v_domain": [0.0, 1.0], "step": 1e-3}
    echo = config.to_dict()
    assert echo["schema"] == 1 and echo["grid"] == {"nu": 50, "nv": 50, "margin": 0.05}


@pytest.mark.parametrize("data, field", [
    (with_changes(schema=2), "schema"),
    (with_changes(kind="parabolic"), "kind"),
    (with_changes(colour="red"), "colour"),
    (with_changes(profile={"type": "spline"}), "profile.type"),
    (with_changes(profile={"type": "constant_f", "a": 1.0, "g_slope": 2}), "profile.g_slope"),
    (with_changes(profile={"type": "constant_f", "g_slope": 1}), "profile.a"),
    (with_changes(profile={"type": "linear", "a": 1.0, "a1": "x", "b": 0.0, "b1": 0.0}), "profile.a1"),
    (with_changes(profile={"type": "ode_solution", "case": "first_elliptic"}), "profile.case"),
    (with_changes(base={"kappa": {"poly": [1.0]}}), "base.kappa.poly"),
    (with_changes(base={"kappa": 1.0, "initial_frame": [[1, 0, 0], [0, 1, 0]]}), "base.initial_frame"),
    (with_changes(u_domain=[1.0, 0.0]), "u_domain"),
    (with_changes(grid={"nu": 0}), "grid.nu"),
    (with_changes(grid={"nv": True}), "grid.nv"),
])
def test_errors_name_the_field(data, field):
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert info.value.field == field
    assert f"field '{field}'" in str(info.value)


def test_constant_f_needs_hyperbolic_kind():
    with pytest.raises(ConfigError, match="hyperbolic"):
        parse_config(with_changes(kind="elliptic"))


def test_build_anchor_surface():
    config = parse_config(with_changes(grid={"nu": 4, "nv": 3}))
    s = build_surface(config)
    grid = build_grid(config, s)
    assert grid.shape == (4, 3)
    np.testing.assert_allclose(s.profile.f(grid.u), 1.0, atol=1e-12)
    np.testing.assert_allclose(s.base.kappa_at(grid.v), 2.0)


def test_polynomial_kappa_and_profile():
    config = parse_config({
        "schema": 1, "kind": "elliptic",
        "profile": {"type": "slope_angle_polynomial", "coeffs": [0.2, 0.1], "f0": 2.0},
        "base": {"kappa": {"polynomial": [1.0, 0.5]}},
    })
    s = build_surface(config)
    assert s.base.kappa_at(0.5) == pytest.approx(1.25)
    assert s.profile.g(0.0) == pytest.approx(0.0)


def test_ode_profile():
    config = parse_config({
        "schema": 1, "kind": "elliptic",
        "profile": {"type": "ode_solution", "case": "first_elliptic"},
        "base": {"kappa": 0.0},
    })
    assert config.profile["params"] == {}
    s = build_surface(config)
    assert s.kind == "elliptic"


def test_profile_outside_domain_is_a_config_error():
    data = with_changes(kind="elliptic",
                        profile={"type": "linear", "a": 1.0, "a1": 0.0, "b": 0.5, "b1": 0.0})
    with pytest.raises(ConfigError) as info:
        build_surface(parse_config(data))
    assert info.value.field == "profile"


def test_bad_initial_frame():
    data = with_changes(base={"kappa": 2.0, "initial_frame": [[1, 0, 0], [0, 2, 0], [0, 0, 1]]})
    with pytest.raises(ConfigError) as info:
        build_surface(parse_config(data))
    assert info.value.field == "base.initial_frame"


def test_margin_that_does_not_fit():
    config = parse_config(with_changes(grid={"margin": 0.6}))
    with pytest.raises(ConfigError) as info:
        build_grid(config, build_surface(config))
    assert info.value.field == "grid.margin"


def test_load_config_reports_json_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "schema": 1,\n  "kind": "elliptic",,\n}\n', encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert info.value.line == 3
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "missing.json"))


def test_load_config_keeps_source(tmp_path):
    path = tmp_path / "anchor.json"
    path.write_text(json.dumps(ANCHOR), encoding="utf-8")
    assert load_config(str(path)).source == str(path)


def test_tolerance_precedence(tmp_path):
    env_file = tmp_path / "env.json"
    env_file.write_text(json.dumps({"harmonic": 1e-3}), encoding="utf-8")
    flag_file = tmp_path / "flag.json"
    flag_file.write_text(json.dumps({"harmonic": 1e-4}), encoding="utf-8")
    environ = {TOLERANCE_ENV: str(env_file)}
    assert resolve_tolerances(None, {}) == Tolerances()
    assert resolve_tolerances(None, environ).harmonic == 1e-3
    assert resolve_tolerances(str(flag_file), environ).harmonic == 1e-4


def test_json_output_has_no_nan():
    text = dumps_json({"a": np.float64("nan"), "b": np.arange(3), "c": np.bool_(True)})
    assert json.loads(text) == {"a": None, "b": [0, 1, 2], "c": True}
    assert to_plain((np.int64(4), float("inf"))) == [4, None]


def test_csv_table(tmp_path):
    rows = np.array([[0.1, 1.0 / 3.0], [2.0, -1e-20]])
    text = csv_text(["u", "f"], rows, comments=["case: demo"])
    assert text.splitlines()[:2] == ["# case: demo", "# u,f"]
    path = tmp_path / "table.csv"
    path.write_text(text, encoding="utf-8")
    np.testing.assert_array_equal(read_csv(str(path)), rows)
    with pytest.raises(ValueError):
        csv_text(["u"], rows)


def test_load_json(tmp_path):
    path = tmp_path / "ok.json"
    path.write_text('{"x": [1, 2]}', encoding="utf-8")
    assert load_json(str(path)) == {"x": [1, 2]}
