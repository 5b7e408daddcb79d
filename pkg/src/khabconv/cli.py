"""Command-line interface.

    khabconv kernel    --n 1 --grid lin:0.5:1:2
    khabconv transform --q q.json --n 2 --grid log:0.1:10:200 --out g.csv
    khabconv invert    --g g.csv --n 2 --mode numeric --out q_hat.csv
    khabconv check     --q extremal --alpha 0.5 --n 2 --out report.json
    khabconv sweep     --config sweep.json --out sweep.csv

Exit codes: 0 success (a conjecture verdict is data, not failure), 1 I/O
failure, 2 invalid arguments or input, 3 divergent integrals, 4 inverse too
ill-conditioned.  Log level comes from KHAB_LOG_LEVEL (error, warn, info,
debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import conjecture
from .errors import ConditioningError, DomainError, EvaluationError, GridTransformError, KhabError
from .funcspace import PowerLawMix, SampledFunction, load_function
from .inverse import InverseConfig, interior_points, inverse_transform_result
from .io import csv_text, json_text, parse_grid, write_atomic
from .kernel import kernel_derivative, kernel_value
from .numerics import QuadratureConfig
from .transform import direct_transform, g_prime_result, integrability_check

log = logging.getLogger("khabconv")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DIVERGENT = 3
EXIT_CONDITIONING = 4

_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
           "info": logging.INFO, "debug": logging.DEBUG}


class Divergent(Exception):
    pass


def _configure_logging() -> None:
    name = os.environ.get("KHAB_LOG_LEVEL", "warn").strip().lower()
    logging.basicConfig(
        level=_LEVELS.get(name, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _quad(args) -> QuadratureConfig:
    if args.tol_rel <= 0 or args.tol_abs <= 0:
        raise DomainError("tolerances must be positive")
    return QuadratureConfig(rel_tol=args.tol_rel, abs_tol=args.tol_abs)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def cmd_kernel(args) -> int:
    grid = parse_grid(args.grid)
    if np.any(grid > 1.0):
        raise DomainError("kernel grid must lie in (0, 1]")
    values = kernel_value(args.n, grid)
    derivs = kernel_derivative(args.n, grid) + 0.0  # no "-0" in the table
    rows = zip(grid, values, derivs)
    _emit(csv_text(["x", "A_n", "dA_n_dx"], rows), args.out)
    return EXIT_OK


def cmd_transform(args) -> int:
    q = load_function(args.q)
    grid = parse_grid(args.grid)
    cfg = _quad(args)
    report = integrability_check(q, float(grid[-1]), cfg)
    if not report.finite:
        raise Divergent(f"q fails the integrability check at t={grid[-1]:g}")
    rows = []
    for t in grid:
        g = direct_transform(q, float(t), args.n, cfg)
        gp = g_prime_result(q, float(t), args.n, cfg)
        if g.diverged or gp.diverged:
            raise Divergent(f"transform integral diverges at t={t:g}")
        if not (g.converged and gp.converged):
            log.warning("quadrature did not reach tolerance at t=%g", t)
        rows.append((t, g.value, gp.value, g.error_estimate))
    _emit(csv_text(["t", "g", "g_prime", "error_estimate"], rows), args.out)
    return EXIT_OK


def cmd_invert(args) -> int:
    g = load_function(args.g)
    mode = "analytic-if-possible" if args.mode == "analytic" else "numeric-only"
    cfg = InverseConfig(mode=mode)
    if args.grid is not None:
        points = parse_grid(args.grid)
    elif isinstance(g, SampledFunction):
        points = interior_points(g.grid, cfg.diff_for(args.n).window_points)
        if points.size == 0:
            raise DomainError("sampled g is too short for the inversion window")
    else:
        raise DomainError("--grid is required when g is a power-law mix")
    rows = []
    for t in points:
        res = inverse_transform_result(g, float(t), args.n, cfg)
        rows.append((t, res.q_hat, res.noise_estimate))
    _emit(csv_text(["t", "q_hat", "noise_estimate"], rows), args.out)
    return EXIT_OK


def _load_q_for_check(spec: str, params: conjecture.ConjectureParams, scale: float):
    if spec == "extremal":
        return conjecture.extremal_q(params).scaled(scale), "extremal" if scale == 1.0 else f"extremal*{scale:g}"
    q = load_function(spec)
    if isinstance(q, PowerLawMix):
        q = q.scaled(scale)
    elif scale != 1.0:
        raise DomainError("--scale only applies to power-law q")
    return q, Path(spec).stem if not spec.lstrip().startswith("{") else "inline"


def cmd_check(args) -> int:
    params = conjecture.ConjectureParams(args.alpha, args.n)
    q, fid = _load_q_for_check(args.q, params, args.scale)
    grid = parse_grid(args.grid)
    report = conjecture.check(
        q, params, grid, _quad(args), args.tol_premise, args.tol_ratio, family_id=fid
    )
    _emit(json_text(report.to_dict()), args.out)
    if report.diverged:
        log.error("an integral diverges; verdict %s", report.verdict)
        return EXIT_DIVERGENT
    return EXIT_OK


def _family_from_config(spec) -> conjecture.Family:
    if spec is None or spec == "extremal":
        return conjecture.extremal_family()
    if isinstance(spec, dict):
        kind = spec.get("kind", "extremal")
        if kind == "extremal":
            return conjecture.extremal_family(tuple(float(s) for s in spec.get("scales", [1.0])))
        if kind == "mixes":
            mixes = [PowerLawMix.from_json(m) for m in spec.get("mixes", [])]
            return conjecture.mix_family(mixes, spec.get("names"))
    raise DomainError(f"unknown family spec {spec!r}")


SWEEP_HEADER = ["alpha", "n", "family_id", "premise_ok", "ratio", "verdict"]


def cmd_sweep(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed sweep config: {exc}") from exc
    if not isinstance(config, dict):
        raise DomainError("sweep config must be a JSON object")
    try:
        alphas = [float(a) for a in config.get("alphas", [])]
        ns = [int(n) for n in config.get("ns", [])]
    except (TypeError, ValueError) as exc:
        raise DomainError(f"malformed alphas/ns: {exc}") from exc
    family = _family_from_config(config.get("family"))
    grid = parse_grid(config.get("grid", "log:0.01:100:200"))
    cfg = QuadratureConfig(
        rel_tol=float(config.get("tol_rel", args.tol_rel)),
        abs_tol=float(config.get("tol_abs", args.tol_abs)),
    )
    reports = conjecture.sweep(
        alphas,
        ns,
        family,
        grid,
        cfg,
        tol_premise=float(config.get("tol_premise", conjecture.DEFAULT_TOL_PREMISE)),
        tol_ratio=float(config.get("tol_ratio", conjecture.DEFAULT_TOL_RATIO)),
        max_workers=int(config.get("workers", 1)),
    )
    rows = [[r.summary_row()[k] for k in SWEEP_HEADER] for r in reports]
    _emit(csv_text(SWEEP_HEADER, rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--tol-rel", type=float, default=1e-10)
    common.add_argument("--tol-abs", type=float, default=1e-12)

    parser = argparse.ArgumentParser(prog="khabconv", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", parents=[common], help="tabulate A_n and dA_n/dx")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", required=True, help="x grid in (0, 1]")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("transform", parents=[common], help="direct conversion q -> g")
    p.add_argument("--q", required=True, help="power-law JSON (file or inline) or sampled CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("invert", parents=[common], help="inverse conversion g -> q")
    p.add_argument("--g", required=True, help="power-law JSON or sampled CSV (columns t, g)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", default=None, help="evaluation points (default: interior of sampled g)")
    p.add_argument("--mode", choices=["analytic", "numeric"], default="analytic")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("check", parents=[common], help="check both inequalities for one q")
    p.add_argument("--q", required=True, help="'extremal', power-law JSON or sampled CSV")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", default="log:0.01:100:200")
    p.add_argument("--scale", type=float, default=1.0, help="multiply q by this factor")
    p.add_argument("--tol-premise", type=float, default=conjecture.DEFAULT_TOL_PREMISE)
    p.add_argument("--tol-ratio", type=float, default=conjecture.DEFAULT_TOL_RATIO)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", parents=[common], help="run checks over an (alpha, n) grid")
    p.add_argument("--config", required=True, help="JSON with alphas, ns, family, grid")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Divergent as exc:
        log.error("%s", exc)
        return EXIT_DIVERGENT
    except ConditioningError as exc:
        log.error("%s", exc)
        return EXIT_CONDITIONING
    except (DomainError, EvaluationError, GridTransformError, KhabError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
