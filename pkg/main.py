#!/usr/bin/env python3
"""
Main Script for the meridian surface verification toolkit

Commands:
1. classify   Build a surface from a JSON config and classify its Gauss map
2. verify     Run a named verification suite
3. solve-ode  Integrate one of the classifying profile ODEs
4. sample     Export the surface as a point cloud

Usage:
    meridian-lab classify --config surface.json [--out report.json] [--tol-file tol.json]
    meridian-lab verify [all|harmonic|first|second|oracle] [--jobs N]
    meridian-lab solve-ode first_elliptic [--param f0=1.2 ...] [--u-span 0 1] [--step 1e-3]
    meridian-lab sample --config surface.json [--out points.csv]

Reports go to stdout (or --out); progress and errors go to stderr.
Exit codes: 0 success, 1 error or failed check, 2 classification 'none',
3 ODE integration failure.
"""

import argparse
import sys
import time
from typing import Dict, List, Optional

from classify import NONE, classify_surface
from errors import OdeError
from laplacian_oracle import compare_laplacians, max_defect
from ode_solvers import CASES, DEFAULT_ODE_STEP, DEFAULT_PARAMS, DEFAULT_U_SPAN, solve_case
from reports import csv_text, save_json, write_text
from surface import sample_points
from surface_config import build_grid, build_surface, load_config, resolve_tolerances
from verify_suites import SUITES, print_summary, run_suite, summary_dict

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCLASSIFIED = 2
EXIT_ODE = 3

ODE_COLUMNS = ("u", "f", "df", "d2f", "residual")
SAMPLE_COLUMNS = ("u", "v", "x1", "x2", "x3", "x4")


def log(message: str = "") -> None:
    print(message, file=sys.stderr)


def parse_param(text: str):
    """Parse a --param value of the form name=number."""
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value of {name!r} is not a number: {value!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', default=None, help='Write the report to this file instead of stdout')
    common.add_argument('--tol-file', default=None,
                        help='JSON tolerance overrides (default: $MERIDIAN_LAB_TOL)')
    common.add_argument('--no-timing', action='store_true',
                        help='Omit the timing field so identical runs give identical bytes')

    parser = argparse.ArgumentParser(
        prog='meridian-lab',
        description='Classify meridian surfaces in Minkowski 4-space by the type of their Gauss map'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('classify', parents=[common], help='Classify the surface described by a config')
    p.add_argument('--config', required=True, help='Surface config (JSON, schema 1)')

    p = sub.add_parser('verify', parents=[common], help='Run a verification suite')
    p.add_argument('suite', nargs='?', default='all', choices=sorted(SUITES))
    p.add_argument('--jobs', type=int, default=1, help='Worker processes (default: 1)')

    p = sub.add_parser('solve-ode', parents=[common], help='Integrate a classifying profile ODE')
    p.add_argument('case', choices=CASES)
    p.add_argument('--param', type=parse_param, action='append', default=[],
                   help='Override a parameter, e.g. --param f0=1.5 (repeatable)')
    p.add_argument('--u-span', type=float, nargs=2, default=list(DEFAULT_U_SPAN), metavar=('START', 'END'))
    p.add_argument('--step', type=float, default=DEFAULT_ODE_STEP)

    p = sub.add_parser('sample', parents=[common], help='Export grid points as CSV')
    p.add_argument('--config', required=True, help='Surface config (JSON, schema 1)')
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    started = time.perf_counter()
    log(f"[1/4] Loading configuration: {args.config}")
    config = load_config(args.config)
    tolerances = resolve_tolerances(args.tol_file)

    log(f"[2/4] Building {config.kind} surface ({config.profile['type']} profile)")
    surface = build_surface(config)
    grid = build_grid(config, surface)

    log(f"[3/4] Classifying on a {grid.shape[0]}x{grid.shape[1]} grid")
    verdict = classify_surface(surface, grid, tolerances)

    log(f"[4/4] Checking the closed form against finite differences (h = {tolerances.fd_step:g})")
    oracle = max_defect(compare_laplacians(surface, grid, tolerances.fd_step))

    report = {
        "config": config.to_dict(),
        "verdict": verdict.to_dict(),
        "laplacian": {"max_defect": oracle, "tolerance": tolerances.oracle, "step": tolerances.fd_step},
    }
    if not args.no_timing:
        report["timing"] = {"seconds": time.perf_counter() - started}
    save_json(report, args.out)

    mark = "✓" if oracle <= tolerances.oracle else "⚠️"
    log(f"{mark} Closed form vs finite differences: max defect {oracle:.3e}")
    if verdict.category == NONE:
        log("✗ No Gauss map type matched")
        return EXIT_UNCLASSIFIED
    label = ", ".join(tag for tag in (verdict.matched_case, verdict.case) if tag) or "no listed case"
    log(f"✓ {verdict.category} ({label})")
    return EXIT_OK


def cmd_verify(args) -> int:
    outcomes = run_suite(args.suite, jobs=args.jobs)
    print_summary(args.suite, outcomes)
    summary = summary_dict(args.suite, outcomes, timing=not args.no_timing)
    save_json(summary, args.out)
    return EXIT_OK if summary["passed"] else EXIT_ERROR


def cmd_solve_ode(args) -> int:
    params: Dict[str, float] = dict(args.param)
    log(f"Solving {args.case} on [{args.u_span[0]:g}, {args.u_span[1]:g}] with step {args.step:g}")
    sol = solve_case(args.case, params, u_span=tuple(args.u_span), step=args.step)
    merged = {**DEFAULT_PARAMS[args.case], **params}
    comments = [f"case: {args.case}",
                "params: " + ", ".join(f"{k}={v:.17g}" for k, v in merged.items()),
                f"step: {args.step:.17g}"]
    write_text(csv_text(ODE_COLUMNS, sol.table(), comments), args.out)
    log(f"✓ {len(sol.u)} samples, literal residual {sol.residual_max:.3e}, "
        f"first-integral residual {sol.first_integral_residual:.3e}")
    return EXIT_OK


def cmd_sample(args) -> int:
    config = load_config(args.config)
    surface = build_surface(config)
    grid = build_grid(config, surface)
    comments = [f"kind: {config.kind}",
                f"grid: nu={config.grid.nu} nv={config.grid.nv} margin={config.grid.margin:g}"]
    write_text(csv_text(SAMPLE_COLUMNS, sample_points(surface, grid), comments), args.out)
    log(f"✓ Wrote {grid.shape[0] * grid.shape[1]} points")
    return EXIT_OK


COMMANDS = {
    'classify': cmd_classify,
    'verify': cmd_verify,
    'solve-ode': cmd_solve_ode,
    'sample': cmd_sample,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point; returns the process exit code.
    """
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except OdeError as e:
        log(f"✗ ODE integration failed: {e}")
        return EXIT_ODE if args.command == 'solve-ode' else EXIT_ERROR
    except FileNotFoundError as e:
        log(f"✗ Error: {e}")
        return EXIT_ERROR
    except ValueError as e:
        log(f"✗ Error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
