"""Command-line entry point: config loading, subcommand dispatch, CSV/JSON.

Exit codes: 0 success, 2 validation/usage error, 3 numeric failure.  All
output files are written atomically (temp file + rename) so a killed run
never leaves a truncated table behind.  Every run emits a JSON manifest
recording the subcommand, config hash, outputs, wall-clock and versions.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from importlib import resources

import numpy as np

from . import __version__, acceptance, dynamics, experiments, trap
from .model import NumericsError, ValidationError, config_hash, load_config

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def atomic_write_text(path, text):
    """Write via temp file + rename in the destination directory."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(columns, rows) -> str:
    """Header + comma-separated rows at full round-trip precision, \\n endings."""
    lines = [",".join(columns)]
    for row in np.asarray(rows):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_table(table, out_dir):
    """Write <name>.csv plus <name>.meta.json; returns the file paths."""
    csv_path = os.path.join(out_dir, f"{table.name}.csv")
    meta_path = os.path.join(out_dir, f"{table.name}.meta.json")
    atomic_write_text(csv_path, format_csv(table.columns, table.rows))
    atomic_write_text(meta_path, json.dumps(
        {"columns": list(table.columns), "provenance": table.provenance},
        indent=2, sort_keys=True) + "\n")
    return [csv_path, meta_path]


def _manifest(args, outputs, started, config_path=None, extra=None):
    doc = {"subcommand": args.command, "outputs": outputs,
           "wall_clock_s": time.perf_counter() - started,
           "versions": {"siba": __version__, "numpy": np.__version__,
                        "python": sys.version.split()[0]},
           "seed": getattr(args, "seed", None),
           "threads": getattr(args, "threads", None)}
    if config_path:
        with open(config_path, "rb") as fh:
            doc["config"] = {"path": config_path,
                             "sha256": hashlib.sha256(fh.read()).hexdigest()}
    if extra:
        doc.update(extra)
    return doc


def _write_manifest(args, outputs, started, config_path=None, extra=None):
    out_dir = getattr(args, "out", None) or "."
    if not os.path.isdir(out_dir):
        out_dir = os.path.dirname(os.path.abspath(out_dir)) or "."
    path = os.path.join(out_dir, f"{args.command}.manifest.json")
    atomic_write_text(path, json.dumps(
        _manifest(args, outputs, started, config_path, extra),
        indent=2, sort_keys=True) + "\n")


def _load(args):
    path = args.config
    if path is None:
        ref = resources.files("siba.data") / "reference_config.json"
        with resources.as_file(ref) as p:
            return load_config(p), str(p)
    if not os.path.exists(path):
        raise ValidationError(f"config file not found: {path}")
    return load_config(path), path


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_eta_scan(args, started):
    q_values = [float(q) for q in args.q.split(",")]
    scan = experiments.sweep_eta_vs_size(q_values, args.nu, args.kr_min,
                                         args.kr_max, args.points)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    outputs = write_table(scan, out_dir)
    _write_manifest(args, outputs, started)
    return EXIT_OK


def cmd_potential(args, started):
    config, path = _load(args)
    lo = max(m.profile.x_lo for m in config.modes)
    hi = min(m.profile.x_hi for m in config.modes)
    xs = np.linspace(lo, hi, args.grid)
    cols = ["x"]
    data = [xs]
    for i, m in enumerate(config.modes, start=1):
        cols.append(f"f{i}")
        data.append(np.asarray(m.profile.value(xs)))
    for i, m in enumerate(config.modes, start=1):
        cols.append(f"n{i}")
        data.append(np.asarray(trap.photon_number(m, xs)))
    cols += ["U_tot", "F"]
    data += [np.asarray(trap.potential(config, xs)),
             np.asarray(trap.force(config, xs))]
    out = args.out or "potential.csv"
    atomic_write_text(out, format_csv(cols, np.column_stack(data)))
    _write_manifest(args, [out], started, path)
    return EXIT_OK


def _metrics_doc(metrics):
    return {"depth": metrics.depth,
            "minimum_position": metrics.minimum_position,
            "resonant_positions": [list(r) for r in metrics.resonant_positions],
            "degenerate_resonance": metrics.degenerate_resonance,
            "wall_separation": metrics.wall_separation,
            "turning_points": list(metrics.turning_points),
            "confinement": metrics.confinement,
            "spring_numeric": metrics.spring_numeric,
            "spring_analytic_terms": [list(t)
                                      for t in metrics.spring_analytic_terms],
            "e_kin": metrics.e_kin}


def cmd_metrics(args, started):
    config, path = _load(args)
    depth = trap.trap_metrics(config, 0.0).depth
    metrics = trap.trap_metrics(config, args.ekin * depth)
    text = json.dumps(_metrics_doc(metrics), indent=2, sort_keys=True) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
        outputs = [args.out]
    else:
        sys.stdout.write(text)
        outputs = []
    _write_manifest(args, outputs, started, path)
    return EXIT_OK


def cmd_simulate(args, started):
    config, path = _load(args)
    metrics = trap.trap_metrics(config, 0.0)
    e_kin = args.ekin * metrics.depth
    t_est, _ = dynamics.estimate_period(config, e_kin)
    dt = args.dt if args.dt is not None else t_est / 1000.0
    n_steps = int(math.ceil(args.periods * 1.4 * t_est / dt))
    x0 = metrics.minimum_position
    if args.mode == "adiabatic":
        traj = dynamics.integrate_adiabatic(config, x0, e_kin, dt, n_steps)
    else:
        traj = dynamics.integrate_full(config, x0, e_kin, dt, n_steps,
                                       args.kappa_over_omega0)
    cols = ["t", "x", "p"]
    data = [traj.t, traj.x, traj.p]
    for i, m in enumerate(config.modes, start=1):
        cols.append(f"n_{i}")
        if traj.beta is None:
            data.append(np.asarray(trap.photon_number(m, traj.x)))
        else:
            data.append(np.abs(traj.beta[:, i - 1]) ** 2)
    cols += ["U", "H_eff"]
    data += [np.asarray(trap.potential(config, traj.x)), traj.energy]
    out = args.out or "traj.csv"
    atomic_write_text(out, format_csv(cols, np.column_stack(data)))
    _write_manifest(args, [out], started, path,
                    extra={"dt": dt, "n_steps": n_steps, "e_kin": e_kin})
    return EXIT_OK


def cmd_fig2(args, started):
    table = experiments.sweep_regimes(threads=args.threads)
    outputs = write_table(table, args.out)
    _write_manifest(args, outputs, started,
                    args.config if args.config else None)
    return EXIT_OK


def cmd_fig3(args, started, kx_r=math.pi / 4, name="fig3"):
    table = experiments.sweep_eta_fixed_depth(
        kx_r, ekin_fracs=tuple(float(f) for f in args.fracs.split(",")),
        eta_grid=np.logspace(-2, 2, args.points), threads=args.threads)
    table = experiments.SweepTable(name, table.columns, table.rows,
                                   table.provenance)
    outputs = write_table(table, args.out)
    _write_manifest(args, outputs, started,
                    args.config if args.config else None)
    return EXIT_OK


def cmd_fig_s3(args, started):
    return cmd_fig3(args, started, kx_r=math.pi / 10, name="figS3")


def cmd_fig5(args, started):
    table = experiments.sweep_fig5(eta=args.eta, n_walls=args.walls,
                                   n_powers=args.powers, threads=args.threads)
    outputs = write_table(table, args.out)
    _write_manifest(args, outputs, started,
                    args.config if args.config else None)
    return EXIT_OK


def cmd_fig_s1(args, started):
    table = experiments.sweep_eta_vs_size(threads=args.threads)
    outputs = write_table(table, args.out)
    _write_manifest(args, outputs, started,
                    args.config if args.config else None)
    return EXIT_OK


def cmd_validate(args, started):
    names = args.criteria.split(",") if args.criteria else None
    results = acceptance.run_all(names=names, threads=args.threads)
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_ok = all_ok and r.passed
        sys.stdout.write(f"{r.name:<{width}}  {status}  {r.seconds:8.2f} s\n")
    sys.stdout.write(f"{'overall':<{width}}  "
                     f"{'PASS' if all_ok else 'FAIL'}\n")
    doc = [{"name": r.name, "passed": r.passed, "seconds": r.seconds,
            "details": r.details} for r in results]
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    report = os.path.join(out_dir, "validate.report.json")
    atomic_write_text(report, json.dumps(doc, indent=2, sort_keys=True,
                                         default=float) + "\n")
    _write_manifest(args, [report], started)
    return EXIT_OK if all_ok else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# Parser / dispatch
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="siba",
        description="Self-induced back-action trapping: potentials, dynamics "
                    "and scaling sweeps")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("SIBA_THREADS", "1")),
                        help="worker threads for sweep points")
    parser.add_argument("--seed", type=int, default=None,
                        help="recorded in the manifest (core is deterministic)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eta-scan", help="back-action parameter vs particle size")
    p.add_argument("--q", required=True, help="comma-separated quality factors")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--kr-min", dest="kr_min", type=float, default=0.0)
    p.add_argument("--kr-max", dest="kr_max", type=float, default=0.9)
    p.add_argument("--points", type=int, default=361)
    p.add_argument("--out", default=".")
    p.set_defaults(fn=cmd_eta_scan)

    p = sub.add_parser("potential", help="potential/force/photon-number table")
    p.add_argument("--config", default=None)
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_potential)

    p = sub.add_parser("metrics", help="trap metrics as JSON")
    p.add_argument("--config", default=None)
    p.add_argument("--ekin", type=float, default=0.1,
                   help="kinetic energy as a fraction of the trap depth")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("simulate", help="integrate the equations of motion")
    p.add_argument("--config", default=None)
    p.add_argument("--ekin", type=float, default=0.1,
                   help="kinetic energy as a fraction of the trap depth")
    p.add_argument("--mode", choices=("adiabatic", "full"), default="adiabatic")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--periods", type=int, default=5)
    p.add_argument("--kappa-over-omega0", dest="kappa_over_omega0",
                   type=float, default=1000.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)

    for name, fn, extra in (("fig2", cmd_fig2, {}),
                            ("fig3", cmd_fig3, {"fracs": True}),
                            ("figS3", cmd_fig_s3, {"fracs": True}),
                            ("fig5", cmd_fig5, {"fig5": True}),
                            ("figS1", cmd_fig_s1, {})):
        p = sub.add_parser(name, help=f"reproduce the {name} data")
        p.add_argument("--config", default=None)
        p.add_argument("--out", default=".")
        if extra.get("fracs"):
            p.add_argument("--fracs", default="0.1,0.3")
            p.add_argument("--points", type=int, default=25)
        if extra.get("fig5"):
            p.add_argument("--eta", type=float, default=100.0)
            p.add_argument("--walls", type=int, default=12)
            p.add_argument("--powers", type=int, default=8)
        p.set_defaults(fn=fn)

    p = sub.add_parser("validate", help="run the acceptance suite")
    p.add_argument("--criteria", default=None,
                   help="comma-separated subset, e.g. 1,3,7")
    p.add_argument("--out", default=".")
    p.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        return args.fn(args, started)
    except ValidationError as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION
    except NumericsError as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
