"""Command-line entry point: run scenarios, verify geometry, fit CSVs.

Exit codes: 0 success, 2 configuration/validation failure, 3 numerical
failure during execution.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import config as cfgmod
from . import fields as fld
from . import group as grp
from . import identities as idn
from . import nikodym as nk
from . import slab as slb
from . import surface as srf
from .reports import loglog_fit, read_csv, write_csv, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SCENARIO_TABLE = (
    ("scenario_A_slab", "rank-2 slab ratio, p = 1.2"),
    ("scenario_A_slab_p3", "rank-2 slab ratio, p = 3"),
    ("scenario_A_stack", "critical-exponent dyadic stack, p = 3/2"),
    ("scenario_B_nikodym", "rank-1 planar blow-up, p = 2"),
    ("heisenberg_identity_suite", "scaling and m = 1 reduction identities"),
)

_VALIDATION_ERRORS = (cfgmod.ConfigError, grp.GroupError, srf.SurfaceError,
                      fld.FieldError, ValueError, OSError)


def _scenario_dir():
    here = os.path.dirname(os.path.dirname(os.path.dirname(
        os.path.abspath(__file__))))
    return os.path.join(here, "scenarios")


def _build_run(cfg: cfgmod.ScenarioConfig, args):
    seed = args.seed if args.seed is not None else cfg.seed
    exp = cfg.experiment
    if cfg.kind == "identity-suite":
        def execute():
            rows = idn.identity_suite(
                s_list=tuple(exp.get("s_list", (1 / 3, 0.5, 2.0, 5.0))),
                n_samples=int(exp.get("n_samples", 100)),
                n_res_reduction=int(exp.get("n_res_reduction", 64)),
                seed=seed)
            if any(row[-1] != "pass" for row in rows):
                raise slb.ExperimentError("identity suite reported a failure")
            return ("identity_report.csv",
                    ("check", "parameter", "error", "tolerance", "status"),
                    rows, {})
        return execute, seed

    g = cfgmod.build_group(cfg.group)
    mu = cfgmod.build_surface(cfg.surface, g.d)
    if cfg.kind in ("slab", "stack"):
        theta = grp.ThetaFunctional(np.asarray(exp["theta"], dtype=float))
        delta_list = tuple(exp.get("delta_list", ()))
        eps = float(exp["eps"])
        scfg = slb.SlabConfig(
            group=g, surface=mu, theta=theta,
            omega0=np.asarray(exp["omega0"], dtype=float), eps=eps,
            delta_list=delta_list or (eps / 8.0,),
            p=float(exp.get("p", 1.5)),
            n_samples_U=int(exp.get("n_samples", 64)), seed=seed,
            jobs=args.jobs)
        if cfg.kind == "slab":
            def execute():
                rep = slb.slab_experiment(scfg)
                return "slab_report.csv", rep.columns, rep.rows, rep.metadata
        else:
            m_list = tuple(int(m) for m in exp.get("m_list", (4, 8, 16, 32)))

            def execute():
                rep = slb.stack_experiment(scfg, m_list=m_list)
                return "stack_report.csv", rep.columns, rep.rows, rep.metadata
        return execute, seed

    ncfg = nk.NikodymConfig(
        group=g, surface=mu, p=float(exp["p"]),
        eta_list=tuple(exp["eta_list"]), N=int(exp.get("N", 128)),
        n_samples=int(exp.get("n_samples", 256)), seed=seed,
        level=exp.get("level"))

    def execute():
        rep = nk.nikodym_experiment(ncfg)
        return "nikodym_report.csv", rep.columns, rep.rows, rep.metadata
    return execute, seed


def _geometry_sidecar(cfg: cfgmod.ScenarioConfig, out_dir: str) -> None:
    exp = cfg.experiment
    approx = nk.nikodym_approx(int(exp.get("N", 128)),
                               min(float(e) for e in exp["eta_list"]),
                               level=exp.get("level"))
    nk.approx_to_json(approx, os.path.join(out_dir,
                                           f"{cfg.name}_geometry.json"))


def cmd_run(args) -> int:
    try:
        cfg = cfgmod.load_config(args.config)
        execute, seed = _build_run(cfg, args)
    except _VALIDATION_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.out or os.environ.get("NILMAX_OUT") or cfg.out_dir
    tic = time.time()
    try:
        csv_name, columns, rows, meta = execute()
    except Exception as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, csv_name)
    write_csv(csv_path, columns, rows)
    if cfg.kind == "nikodym":
        try:
            _geometry_sidecar(cfg, out_dir=out_dir)
        except Exception as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
    manifest_extra = {"scenario": cfg.name, "kind": cfg.kind,
                      "csv": csv_name, "jobs": args.jobs}
    if args.mesh_budget is not None:
        manifest_extra["mesh_budget"] = args.mesh_budget
    write_manifest(os.path.join(out_dir, f"{cfg.name}_manifest.json"),
                   cfgmod.serialize_config(cfg), seed, time.time() - tic,
                   extra=manifest_extra)
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_list_scenarios(_args) -> int:
    width = max(len(name) for name, _ in SCENARIO_TABLE)
    for name, desc in SCENARIO_TABLE:
        path = os.path.join(_scenario_dir(), name + ".toml")
        mark = "" if os.path.exists(path) else "  (missing)"
        print(f"{name.ljust(width)}  {desc}{mark}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        approx = nk.approx_from_json(args.geometry)
    except (OSError, ValueError, KeyError) as exc:
        print(f"cannot load geometry: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    res = nk.verify_assignment(approx, n_points=args.points, seed=args.seed or 0,
                               mode=args.mode)
    print(f"checked {res['n_checked']} points ({res['mode']}): "
          f"{res['failures']} failures")
    return EXIT_OK if res["failures"] == 0 else EXIT_NUMERIC


def cmd_fit(args) -> int:
    try:
        columns, rows = read_csv(args.csv)
        xi, yi = columns.index(args.x), columns.index(args.y)
        pairs = [(row[xi], row[yi]) for row in rows]
        fit = loglog_fit(pairs)
    except (OSError, ValueError) as exc:
        print(f"cannot fit: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"slope = {fit.slope:.6g} +/- {fit.stderr:.2g}  "
          f"R^2 = {fit.r_squared:.6g}  n = {fit.n_points}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilmax",
                                 description="group-averaging scaling lab")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario config")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    run.add_argument("--out", default=None)
    run.add_argument("--mesh-budget", type=int, default=None)
    run.set_defaults(fn=cmd_run)

    ls = sub.add_parser("list-scenarios", help="shipped scenario table")
    ls.set_defaults(fn=cmd_list_scenarios)

    ver = sub.add_parser("verify", help="re-verify a geometry file")
    ver.add_argument("geometry")
    ver.add_argument("--points", type=int, default=10_000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--mode", choices=("exact", "float"), default="exact")
    ver.set_defaults(fn=cmd_verify)

    fit = sub.add_parser("fit", help="log-log fit of two CSV columns")
    fit.add_argument("csv")
    fit.add_argument("--x", default=None)
    fit.add_argument("--y", default="ratio")
    fit.set_defaults(fn=cmd_fit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.fn is cmd_fit and args.x is None:
        try:
            columns, _ = read_csv(args.csv)
            args.x = columns[0]
        except (OSError, ValueError) as exc:
            print(f"cannot fit: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    return args.fn(args)


def entry() -> None:
    sys.exit(main())
