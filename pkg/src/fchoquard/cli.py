"""Command-line front end.

Exit codes: 0 success, 1 an asserted certificate failed, 2 configuration or
I/O error, 3 solver did not converge (partial results are still written).
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import RunConfig, SWEEP_AXES, load_config, sweep_config
from .errors import ChoquardError, ConfigError, SnapshotError
from .ground_state import center, find_seed, fixed_point_resolvent, minimize_pohozaev
from .inequality_lab import run_battery
from .io import load_snapshot, save_snapshot, write_csv, write_json
from .verify import decay_fit, pohozaev_residual, radial_profile, verification_report

EXIT_OK, EXIT_CERT, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"fchoquard: {msg}", file=sys.stderr)


def _workers() -> int:
    env = os.environ.get("FCHQ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            _err(f"ignoring FCHQ_THREADS={env!r}")
    return max(1, min(4, os.cpu_count() or 1))


def _load(args) -> RunConfig:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cfg = load_config(args.config)
    return cfg.with_overrides(grid_n=args.grid_n, box_L=args.box_L,
                              solver=getattr(args, "solver", None), out=args.out)


def _solve(cfg: RunConfig):
    """Run the configured solver(s); returns {name: SolveResult}."""
    seed = find_seed(cfg.model, cfg.params, cfg.grid)
    out = {}
    if cfg.method in ("pohozaev", "both"):
        out["pohozaev"] = minimize_pohozaev(seed, cfg.model, cfg.params, cfg.solve)
    if cfg.method in ("fixedpoint", "both"):
        out["fixedpoint"] = fixed_point_resolvent(seed, cfg.model, cfg.params, cfg.solve)
    return out


def _write_result(res, out: Path, stem: str, formats) -> list[Path]:
    written = []
    if "json" in formats:
        written.append(write_json(res.as_dict(), out / f"{stem}.json"))
    if "snapshot" in formats:
        written.append(save_snapshot(res.u, out / f"{stem}.fchq"))
    if "csv" in formats:
        prof = radial_profile(res.u)
        path = out / f"{stem}_profile.csv"
        path.write_text(prof.to_csv())
        written.append(path)
    return written


def cmd_solve(cfg: RunConfig) -> int:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    try:
        results = _solve(cfg)
    except ChoquardError as exc:
        _err(f"solve failed: {exc}")
        return EXIT_SOLVER
    stems = {"pohozaev": "solution", "fixedpoint": "solution_fixedpoint"}
    for name, res in results.items():
        for path in _write_result(res, out, stems[name], cfg.formats):
            print(path)
        print(f"{name}: converged={res.converged} iterations={res.iterations} "
              f"J={res.report.energy:.12g} P={res.report.pohozaev:.3e}")
        for w in res.warnings:
            print(f"  warning: {w}")
    if len(results) == 2:
        a, b = (center(results[k].u).values for k in ("pohozaev", "fixedpoint"))
        ja, jb = (results[k].report.energy for k in ("pohozaev", "fixedpoint"))
        cmp = {"l2_relative": float(np.linalg.norm(a - b) / np.linalg.norm(a)),
               "energy_relative": abs(ja - jb) / abs(ja)}
        write_json(cmp, out / "comparison.json")
        print(f"cross-solver: L2 rel {cmp['l2_relative']:.3e}, J rel {cmp['energy_relative']:.3e}")
    return EXIT_OK if all(r.converged for r in results.values()) else EXIT_SOLVER


def _read_snapshot(path, cfg: RunConfig):
    u = load_snapshot(path)
    g, c = u.grid, cfg.grid
    if (g.dim, g.n) != (c.dim, c.n) or not np.isclose(g.L, c.L, rtol=1e-14, atol=0):
        raise SnapshotError(f"snapshot grid (N={g.dim}, n={g.n}, L={g.L}) does not match the "
                            f"config (N={c.dim}, n={c.n}, L={c.L})")
    return u


def cmd_verify(snapshot, cfg: RunConfig) -> int:
    u = _read_snapshot(snapshot, cfg)
    rep = verification_report(u, cfg.model, cfg.params, pohozaev_tol=cfg.solve.pohozaev_tol)
    if u.sup == 0:
        rep["note"] = "trivial solution: u = 0"
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    print(write_json(rep, cfg.out_dir / "verify.json"))
    for name, item in rep.items():
        if isinstance(item, dict) and "passed" in item:
            tag = "PASS" if item["passed"] else "FAIL"
            print(f"{name}: {tag}{'' if item['asserted'] else ' (informational)'}")
    return EXIT_OK if rep["all_asserted_passed"] else EXIT_CERT


def _sweep_point(task):
    idx, cfg, axis, value = task
    row = {"index": idx, "value": value, "converged": False, "p_mu_estimate": None,
           "decay_slope": None, "pohozaev_residual": None, "residual": None, "error": None}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            c = sweep_config(cfg, axis, value)
            res = _solve(c)[c.method if c.method != "both" else "pohozaev"]
            row.update(converged=res.converged, p_mu_estimate=res.p_mu_estimate, residual=res.residual,
                       pohozaev_residual=pohozaev_residual(res))
            try:
                row["decay_slope"] = decay_fit(res).slope
            except ChoquardError:
                pass
            write_json(res.as_dict(), c.out_dir / f"sweep_{idx:03d}.json")
    except ChoquardError as exc:
        row["error"] = str(exc)
    return row


def cmd_sweep(cfg: RunConfig, axis: str, values) -> int:
    values = list(values)
    if not values:
        _err("sweep needs at least one value")
        return EXIT_CONFIG
    if axis not in SWEEP_AXES:
        _err(f"sweep axis must be one of {SWEEP_AXES}")
        return EXIT_CONFIG
    for v in values:
        sweep_config(cfg, axis, v)  # validate every point before starting
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(i, cfg, axis, float(v)) for i, v in enumerate(values)]
    nw = min(_workers(), len(tasks))
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    header = ["value", "p_mu_estimate", "decay_slope", "pohozaev_residual", "residual", "converged", "error"]
    path = write_csv([[r[k] for k in header] for r in rows], header, cfg.out_dir / "sweep.csv")
    print(path)
    return EXIT_OK if any(r["converged"] for r in rows) else EXIT_SOLVER


def cmd_ineq(cfg: RunConfig, trials: int) -> int:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    reports = run_battery(cfg.params, trials=trials, seed=cfg.seed)
    bad = 0
    for r in reports:
        write_json(r.as_dict(), cfg.out_dir / f"ineq_{r.name}.json")
        print(f"{r.name}: trials={r.trials} violations={r.violations} worst_margin={r.worst_margin:.3e}")
        bad += r.violations
    return EXIT_OK if bad == 0 else EXIT_CERT


def cmd_decay(cfg: RunConfig, snapshot=None, window=None, tol: float = 0.3) -> int:
    if snapshot is not None:
        u = _read_snapshot(snapshot, cfg)
    else:
        res = _solve(cfg)
        u = next(iter(res.values())).u
    fit = decay_fit(u, cfg.params, tuple(window) if window else None)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    d = fit.as_dict()
    d["asserted"] = cfg.decay_asserted
    print(write_json(d, cfg.out_dir / "decay.json"))
    print(f"slope {fit.slope:.4f} (expected {fit.expected:g}), r^2 {fit.r_squared:.5f}, "
          f"envelope ratio {fit.envelope_ratio:.3f}")
    ok = abs(fit.slope - fit.expected) <= tol and fit.r_squared >= 0.99 and fit.envelope_ratio < 10
    return EXIT_OK if ok or not cfg.decay_asserted else EXIT_CERT


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fchoquard", description="Ground states of the fractional Choquard equation.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="config file (default: shipped default.cfg)")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--grid-n", type=int, default=None, help="points per axis override")
    common.add_argument("--box-L", type=float, default=None, help="box half-length override")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common], help="compute a ground state")
    p.add_argument("--solver", choices=("pohozaev", "fixedpoint", "both"), default=None)
    p = sub.add_parser("verify", parents=[common], help="certificates for a snapshot")
    p.add_argument("snapshot", type=Path)
    p = sub.add_parser("sweep", parents=[common], help="solve over a parameter list")
    p.add_argument("--solver", choices=("pohozaev", "fixedpoint", "both"), default=None)
    p.add_argument("--axis", choices=SWEEP_AXES, default=None)
    p.add_argument("--values", type=float, nargs="*", default=None)
    p = sub.add_parser("ineq", parents=[common], help="run the inequality battery")
    p.add_argument("--trials", type=int, default=10**6)
    p = sub.add_parser("decay", parents=[common], help="fit the tail exponent")
    p.add_argument("snapshot", type=Path, nargs="?", default=None)
    p.add_argument("--solver", choices=("pohozaev", "fixedpoint", "both"), default=None)
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("R1", "R2"))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            return cmd_verify(args.snapshot, cfg)
        if args.command == "sweep":
            axis = args.axis or cfg.sweep_axis
            values = args.values if args.values is not None else cfg.sweep_values
            return cmd_sweep(cfg, axis, values)
        if args.command == "ineq":
            return cmd_ineq(cfg, args.trials)
        if args.command == "decay":
            return cmd_decay(cfg, args.snapshot, args.window)
    except (ConfigError, SnapshotError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except ChoquardError as exc:
        _err(str(exc))
        return EXIT_CERT
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
