"""Command-line front end.

Commands:
  run         integrate a flow from a config file; writes monitors.csv,
              summary.json and periodic snapshots into the output directory
  check       residual table for the initial hypersurface of a config
  slice-table closed-form quermassintegrals of radial slices as CSV
  inequality  evaluate A_0, A_2, xi(A_0) and the gap for a snapshot file
  report      render matplotlib figures from a run's monitors.csv

Config files are strict key=value text; see CONFIG_KEYS below.  Exit codes:
0 ok, 2 config error, 3 validation failure, 4 flow abort.

Documented residual tolerances for `check` (h = smallest angular spacing):
gradient identity <= 20 h^2, traced Hessian identity <= 200 h^2,
Hsiung-Minkowski residual / A_0 <= 100 h^2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .errors import DomainError, SpacelikeError
from .expressions import ExpressionError, evaluate
from .flow import FlowConfig, run
from .geometry import RadialGraph, identity_residuals, validate_hypersurface
from .grids import (AxisymGrid, LatLongGrid, SnapshotError, read_snapshot,
                    write_snapshot)
from .quermass import hsiung_minkowski_residual, quermass_all, slice_table, xi

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_ABORT = 4


class ConfigError(ValueError):
    """Malformed run configuration."""


CONFIG_KEYS = {
    "n": int, "k": int, "grid": str, "m": int, "ntheta": int, "nphi": int,
    "rho0": str, "cfl": float, "t_max": float, "conv_tol": float,
    "monitor_every": int, "scheme": str, "out": str, "snapshot_every": int,
}

DEFAULTS = {
    "cfl": 0.4, "t_max": 50.0, "conv_tol": 1e-6, "monitor_every": 50,
    "scheme": "euler", "out": ".", "snapshot_every": 0,
}


def parse_config(path: str) -> dict:
    """Strict key=value config parsing; unknown keys are rejected."""
    cfg = dict(DEFAULTS)
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        caster = CONFIG_KEYS[key]
        try:
            cfg[key] = caster(value) if caster is not str else value
        except ValueError:
            raise ConfigError(
                f"line {lineno}: bad {caster.__name__} value {value!r} "
                f"for key {key!r}") from None
    for key in ("n", "k", "grid", "rho0"):
        if key not in cfg:
            raise ConfigError(f"missing required key {key!r}")
    return cfg


def build_grid(cfg: dict):
    if cfg["grid"] == "axisym":
        if "m" not in cfg:
            raise ConfigError("axisym grid requires key 'm'")
        return AxisymGrid(cfg["n"], cfg["m"])
    if cfg["grid"] == "latlong":
        if "ntheta" not in cfg or "nphi" not in cfg:
            raise ConfigError("latlong grid requires keys 'ntheta' and 'nphi'")
        if cfg["n"] != 2:
            raise ConfigError("latlong grid requires n=2")
        return LatLongGrid(cfg["ntheta"], cfg["nphi"])
    raise ConfigError(f"unknown grid {cfg['grid']!r}")


def build_initial(cfg: dict) -> RadialGraph:
    grid = build_grid(cfg)
    if grid.kind == "axisym":
        variables = {"theta": grid.theta}
    else:
        th, ph = np.meshgrid(grid.theta, grid.phi, indexing="ij")
        variables = {"theta": th, "phi": ph}
    rho0 = np.broadcast_to(np.asarray(evaluate(cfg["rho0"], variables),
                                      dtype=float), grid.shape)
    return RadialGraph(grid, np.array(rho0))


def monitor_header(n: int) -> list:
    cols = ["t", "dt"]
    cols += [f"A_{m}" for m in range(-1, n + 1)]
    cols += ["min_rho", "max_rho", "max_u", "min_F", "max_F", "max_kappa",
             "hm_residual_1", "gap"]
    return cols


def _record_row(rec) -> list:
    row = [rec.t, rec.dt]
    row += list(rec.A)
    row += [rec.min_rho, rec.max_rho, rec.max_u, rec.min_F, rec.max_F,
            rec.max_kappa, rec.hm_residual_1, rec.gap]
    return row


def write_monitors_csv(path: str, n: int, records) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(monitor_header(n)) + "\n")
        for rec in records:
            fh.write(",".join("%.12g" % v for v in _record_row(rec)) + "\n")


def cmd_run(config_path: str, out_override: str = None) -> int:
    try:
        cfg = parse_config(config_path)
        M0 = build_initial(cfg)
        flow_cfg = FlowConfig(n=cfg["n"], k=cfg["k"], cfl=cfg["cfl"],
                              t_max=cfg["t_max"], conv_tol=cfg["conv_tol"],
                              monitor_every=cfg["monitor_every"],
                              scheme=cfg["scheme"])
    except (ConfigError, ExpressionError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = out_override or cfg["out"]
    os.makedirs(out, exist_ok=True)
    snapshot_every = cfg["snapshot_every"]
    emitted = [0]

    def on_monitor(state, record):
        idx = emitted[0]
        emitted[0] += 1
        if snapshot_every > 0 and idx % snapshot_every == 0:
            path = os.path.join(out, f"snapshot_{state.steps:08d}.txt")
            write_snapshot(path, state.M.grid, state.M.rho)

    start = time.perf_counter()
    try:
        result = run(flow_cfg, M0, on_monitor=on_monitor)
    except DomainError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        summary = {"termination": "invalid_initial", "reason": str(exc),
                   "wall_time": time.perf_counter() - start}
        with open(os.path.join(out, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2)
        return EXIT_VALIDATION
    write_monitors_csv(os.path.join(out, "monitors.csv"), cfg["n"],
                       result.records)
    write_snapshot(os.path.join(out, "snapshot_final.txt"),
                   result.state.M.grid, result.state.M.rho)
    summary = {
        "termination": result.termination,
        "reason": result.reason,
        "r_infinity": None if np.isnan(result.r_infinity) else result.r_infinity,
        "t_final": result.t_final,
        "step_count": result.steps,
        "wall_time": result.wall_time,
    }
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    print(f"termination: {result.termination} ({result.reason}); "
          f"steps={result.steps}, t={result.t_final:.6g}")
    return EXIT_OK if result.termination != "aborted" else EXIT_ABORT


def cmd_check(config_path: str) -> int:
    try:
        cfg = parse_config(config_path)
        M0 = build_initial(cfg)
    except (ConfigError, ExpressionError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = validate_hypersurface(M0, cfg["k"])
    print(f"spacelike: {report.spacelike} (min w^2 = {report.min_w2:.6g})")
    if not report.spacelike:
        print("validation failure: hypersurface is not spacelike")
        return EXIT_VALIDATION
    print(f"strictly {cfg['k']}-convex: {report.strictly_convex} "
          f"(min sigma = {report.min_sigma})")
    h = M0.grid.min_spacing
    res = identity_residuals(M0)
    q = quermass_all(M0, k=min(cfg["k"], cfg["n"]))
    area = q.A_m(0)
    rows = [("gradient_identity", res["gradient"], 20.0 * h * h),
            ("traced_hessian_identity", res["traced_hessian"], 200.0 * h * h)]
    for m in range(cfg["n"]):
        rows.append((f"hsiung_minkowski_{m}_rel",
                     abs(hsiung_minkowski_residual(M0, m)) / area,
                     100.0 * h * h))
    ok = report.strictly_convex
    print(f"{'residual':<28}{'value':>14}{'tolerance':>14}")
    for name, value, tol in rows:
        status = "ok" if value <= tol else "FAIL"
        ok = ok and value <= tol
        print(f"{name:<28}{value:>14.4e}{tol:>14.4e}  {status}")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_slice_table(n: int, r_min: float, r_max: float, steps: int,
                    out: str = None) -> int:
    try:
        rows = slice_table(n, r_min, r_max, steps)
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    header = "r," + ",".join(f"A{m}" for m in range(n + 1)) + ",xi_gap"
    lines = [header]
    for r, A, gap in rows:
        lines.append("%.12g," % r + ",".join("%.12g" % a for a in A[1:])
                     + ",%.12g" % gap)
    text = "\n".join(lines) + "\n"
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "slice_table.csv"), "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_inequality(snapshot_path: str) -> int:
    try:
        grid, rho = read_snapshot(snapshot_path)
    except (SnapshotError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        M = RadialGraph(grid, rho)
        q = quermass_all(M)
    except (SpacelikeError, DomainError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    a0, a2 = q.A_m(0), q.A_m(2)
    print(f"A_0      = {a0:.12g}")
    print(f"A_2      = {a2:.12g}")
    print(f"xi(A_0)  = {xi(a0, grid.n):.12g}")
    print(f"gap      = {q.gap:.12g}")
    return EXIT_OK


def cmd_report(out_dir: str) -> int:
    from .report import render_report
    try:
        paths = render_report(out_dir)
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in paths:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dsflow",
        description="Locally constrained curvature flows in de Sitter space")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a flow from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)

    p_check = sub.add_parser("check", help="identity residuals of rho0")
    p_check.add_argument("--config", required=True)

    p_slice = sub.add_parser("slice-table", help="quermass table of slices")
    p_slice.add_argument("--n", type=int, required=True)
    p_slice.add_argument("--r-min", type=float, required=True)
    p_slice.add_argument("--r-max", type=float, required=True)
    p_slice.add_argument("--steps", type=int, required=True)
    p_slice.add_argument("--out", default=None)

    p_ineq = sub.add_parser("inequality", help="inequality gap of a snapshot")
    p_ineq.add_argument("--snapshot", required=True)

    p_rep = sub.add_parser("report", help="render figures from monitors.csv")
    p_rep.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    if args.command == "run":
        code = cmd_run(args.config, args.out)
        if code == EXIT_ABORT:
            print(json.dumps({"error": "flow_abort"}), file=sys.stderr)
        return code
    if args.command == "check":
        return cmd_check(args.config)
    if args.command == "slice-table":
        return cmd_slice_table(args.n, args.r_min, args.r_max, args.steps,
                               args.out)
    if args.command == "inequality":
        return cmd_inequality(args.snapshot)
    return cmd_report(args.out)


if __name__ == "__main__":
    sys.exit(main())
