"""Command-line entry point.

    antiplane [--config FILE] [--out DIR] material check
    antiplane ... conjugate table [--lambdas 0.25,1,4]
    antiplane ... period-map [--lam 1 --c-min 1e-6 --c-max 10 --n 20]
    antiplane ... spectrum [--epsilons 0.2,0.1,0.05]
    antiplane ... front solve [--epsilon E | --lambda L] [--L --nx --ny --tol --bc]
    antiplane ... branch continue [--epsilon 0.05 --steps 40 --ds --ds-max]
    antiplane ... verify all [--only 1,2,3]

Exit status: 0 success, 1 domain failure (including failed checks),
2 usage error. Failures also write ``error.json`` into the output
directory.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import conjugate_flow as cf
from . import continuation as ct
from . import front_solver as fs
from . import spectrum, verification
from .config import ConfigError, dump_json, load_config
from .errors import AntiplaneError
from .material import check_structural_conditions

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _fmt(v) -> str:
    return f"{v:.17g}" if isinstance(v, (float, np.floating)) else str(v)


def _write_csv(path, cols, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in cols])


def _meta(cfg, **extra) -> dict:
    return {"config_hash": cfg.digest(), "config": cfg.canonical(), **extra}


# ---------------------------------------------------------------------------
# commands


def cmd_material_check(cfg, out) -> int:
    model = cfg.model()
    m = cfg["material"]
    report = check_structural_conditions(model, m["q_max"], m["kappa_max"], m["lam_max"], m["n_samples"])
    dump_json(os.path.join(out, "material_report.json"), _meta(cfg, model=model.to_dict(), report=report.to_dict()))
    for name, res in report.conditions.items():
        print(f"{'ok  ' if res.passed else 'FAIL'} {name} (worst margin {res.margin:.6g})")
    return EXIT_OK if report.all_passed else EXIT_FAIL


CONJUGATE_COLS = ["lambda", "c1", "U_plus_at_0", "Vmax", "S_plus", "phi_dot_end", "sigma0"]


def cmd_conjugate_table(cfg, out) -> int:
    model = cfg.model()
    lams = cfg["conjugate"]["lambdas"]
    if any(not lam > 0 for lam in lams):
        raise AntiplaneError("all lambda values must be positive")
    n_steps, n_spec = cfg["numeric"]["n_steps"], cfg["numeric"]["n_spectral"]
    rows = []
    for lam in lams:
        prof = cf.u_plus(model, lam, n_steps=max(n_steps, 2 * n_spec))
        sig = spectrum.principal_eigenvalue(spectrum.assemble_operator(model, prof, lam, n_spec)).sigma0
        rows.append(
            {
                "lambda": float(lam),
                "c1": prof.c,
                "U_plus_at_0": prof.center_value,
                "Vmax": prof.max_slope,
                "S_plus": cf.flow_force_1d(model, prof),
                "phi_dot_end": spectrum.kernel_test_shooting(model, prof),
                "sigma0": sig,
            }
        )
    _write_csv(os.path.join(out, "conjugate.csv"), CONJUGATE_COLS, rows)
    dump_json(os.path.join(out, "conjugate.json"), _meta(cfg, n_rows=len(rows)))
    print(f"wrote {len(rows)} rows to {os.path.join(out, 'conjugate.csv')}")
    return EXIT_OK


def cmd_period_map(cfg, out) -> int:
    model = cfg.model()
    p = cfg["period_map"]
    if not (0 < p["c_min"] < p["c_max"]) or p["n"] < 2 or p["lam"] < 0:
        raise AntiplaneError("need 0 < c_min < c_max, n >= 2 and lam >= 0")
    cs = np.logspace(math.log10(p["c_min"]), math.log10(p["c_max"]), p["n"])
    rows = [{"c": float(c), "P": cf.period_map(model, c, p["lam"], cfg["numeric"]["n_quad"])} for c in cs]
    _write_csv(os.path.join(out, "period_map.csv"), ["c", "P"], rows)
    meta = {"lambda": p["lam"], "P_limit": cf.period_limit(model, p["lam"])}
    if p["lam"] > 0:
        meta["c1"] = cf.solve_c1(model, p["lam"])
    dump_json(os.path.join(out, "period_map.json"), _meta(cfg, **meta))
    print(f"wrote {len(rows)} samples to {os.path.join(out, 'period_map.csv')}")
    return EXIT_OK


def cmd_spectrum(cfg, out) -> int:
    model = cfg.model()
    eps = cfg["spectrum"]["epsilons"]
    if any(not e > 0 for e in eps):
        raise AntiplaneError("epsilon values must be positive")
    n = cfg["numeric"]["n_spectral"]
    table = spectrum.sigma0_curve(model, eps, n=n)
    rows = []
    for e, sig in table:
        prof = cf.u_plus(model, e * e, n_steps=2 * n)
        rows.append({"epsilon": e, "lambda": e * e, "sigma0": sig, "phi_dot_end": spectrum.kernel_test_shooting(model, prof)})
    spectrum.write_spectrum_csv(os.path.join(out, "spectrum.csv"), rows)
    meta = {"sigma0_over_eps2": (table[:, 1] / table[:, 0] ** 2).tolist()}
    try:
        meta["richardson"] = spectrum.richardson_ratio(table)
    except AntiplaneError:
        meta["richardson"] = None
    dump_json(os.path.join(out, "spectrum.json"), _meta(cfg, **meta))
    for r in rows:
        print(f"eps={r['epsilon']:.6g} sigma0/eps^2={r['sigma0'] / r['epsilon'] ** 2:.10g}")
    return EXIT_OK


def cmd_front_solve(cfg, out) -> int:
    model = cfg.model()
    f = cfg["front"]
    lam = f["lam"] if math.isfinite(f["lam"]) else f["epsilon"] ** 2
    if not lam > 0:
        raise AntiplaneError("front solve needs lambda > 0")
    eps = math.sqrt(lam)
    grid = fs.Grid2D.for_lambda(lam, n_y=f["ny"], L=f["L"] if math.isfinite(f["L"]) else None)
    if f["nx"]:
        grid = fs.Grid2D(grid.L, f["nx"], f["ny"])
    seed = fs.asymptotic_seed(model, eps, grid=grid)
    seed = fs.FrontState(grid, seed.u, seed.lam, bc=f["bc"])
    front = fs.newton_solve(model, seed, tol=cfg["numeric"]["tol"], max_iter=f["max_iter"], far_field=f["far_field"])
    res = float(np.max(np.abs(fs.residual(model, front))))
    nodal = fs.nodal_check(front)
    mp = fs.max_principle_check(model, front)
    S = fs.flow_force_columns(model, front)
    fs.write_field(os.path.join(out, "u.csv"), front)
    meta = {
        "lambda": lam,
        "epsilon": eps,
        "grid": grid.to_dict(),
        "bc": front.bc,
        "residual_max": res,
        "nodal_ok": nodal.ok,
        "nodal": nodal.to_dict(),
        "max_principle": mp.to_dict(),
        "blowup_proxy": fs.blowup_proxy(front),
        "flow_force": {"x": grid.x.tolist(), "S": S.tolist(), "max_deviation": float(np.max(np.abs(S - S[grid.n_x // 2])))},
    }
    dump_json(os.path.join(out, "meta.json"), _meta(cfg, **meta))
    print(f"lambda={lam:.10g} residual={res:.3e} nodal_ok={nodal.ok} max_principle_ok={mp.ok}")
    return EXIT_OK if nodal.ok else EXIT_FAIL


def cmd_branch_continue(cfg, out) -> int:
    model = cfg.model()
    b = cfg["branch"]
    ctl = ct.ContinuationControls(
        ds=b["ds"], n_steps=b["steps"], ds_max=b["ds_max"], tol=cfg["numeric"]["tol"],
        n_proxy_max=b["n_proxy_max"], lam_max=b["lam_max"], n_spectral=cfg["numeric"]["n_spectral"],
    )
    start = fs.newton_solve(model, fs.asymptotic_seed(model, b["epsilon"], n_y=b["ny"]), tol=cfg["numeric"]["tol"])

    def echo(p):
        print(f"s={p.s:.6g} lambda={p.lam:.10g} sigma0={p.sigma0:.6g} N={p.N_proxy:.6g} nodal_ok={p.nodal.ok}")

    branch = ct.continue_branch(model, start, ctl, eps0=b["epsilon"], callback=echo)
    branch.write_csv(os.path.join(out, "branch.csv"))
    dump_json(os.path.join(out, "branch.json"), _meta(cfg, summary=branch.summary()))
    print(f"termination: {branch.tag.value} ({branch.stop})")
    return EXIT_OK if branch.summary()["all_nodal_ok"] else EXIT_FAIL


def cmd_verify_all(cfg, out) -> int:
    only = cfg["verify"]["only"] or None
    if only and any(i not in verification.CRITERIA for i in only):
        raise ConfigError(f"criteria are numbered 1..{len(verification.CRITERIA)}")
    results = verification.run_all(cfg.model(), only=only)
    dump_json(os.path.join(out, "verify.json"), _meta(cfg, results=[r.to_dict() for r in results]))
    ok = all(r.ok for r in results)
    print(f"{sum(r.ok for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    ("material", "check"): cmd_material_check,
    ("conjugate", "table"): cmd_conjugate_table,
    ("period-map", None): cmd_period_map,
    ("spectrum", None): cmd_spectrum,
    ("front", "solve"): cmd_front_solve,
    ("branch", "continue"): cmd_branch_continue,
    ("verify", "all"): cmd_verify_all,
}

# flag dest -> (section, key)
OVERRIDES = {
    "family": ("model", "family"),
    "w1": ("model", "w1"),
    "extra": ("model", "extra"),
    "tol": ("numeric", "tol"),
    "lambdas": ("conjugate", "lambdas"),
    "pm_lam": ("period_map", "lam"),
    "c_min": ("period_map", "c_min"),
    "c_max": ("period_map", "c_max"),
    "n": ("period_map", "n"),
    "epsilons": ("spectrum", "epsilons"),
    "f_epsilon": ("front", "epsilon"),
    "f_lambda": ("front", "lam"),
    "L": ("front", "L"),
    "nx": ("front", "nx"),
    "f_ny": ("front", "ny"),
    "bc": ("front", "bc"),
    "b_epsilon": ("branch", "epsilon"),
    "steps": ("branch", "steps"),
    "ds": ("branch", "ds"),
    "ds_max": ("branch", "ds_max"),
    "b_ny": ("branch", "ny"),
    "only": ("verify", "only"),
}


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subparser from resetting options given before the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--out", help="output directory (default: current)")
    common.add_argument("--family", choices=["linear", "tanh"])
    common.add_argument("--w1", type=str)
    common.add_argument("--extra", type=str, help="higher strain-energy coefficients, comma separated")
    common.add_argument("--tol", type=str)

    p = argparse.ArgumentParser(prog="antiplane", description="Anti-plane shear fronts: conjugate flows, spectra, fronts, branches.", parents=[common])
    sub = p.add_subparsers(dest="group", required=True)

    mat = sub.add_parser("material", parents=[common]).add_subparsers(dest="action", required=True)
    mat.add_parser("check", parents=[common], help="audit the structural conditions")

    conj = sub.add_parser("conjugate", parents=[common]).add_subparsers(dest="action", required=True)
    t = conj.add_parser("table", parents=[common], help="tabulate the positive transversal state")
    t.add_argument("--lambdas", type=str)

    pm = sub.add_parser("period-map", parents=[common], help="sample the period map")
    pm.add_argument("--lam", dest="pm_lam", type=str)
    pm.add_argument("--c-min", dest="c_min", type=str)
    pm.add_argument("--c-max", dest="c_max", type=str)
    pm.add_argument("--n", type=str)

    sp = sub.add_parser("spectrum", parents=[common], help="principal eigenvalue near onset")
    sp.add_argument("--epsilons", type=str)

    fr = sub.add_parser("front", parents=[common]).add_subparsers(dest="action", required=True)
    f = fr.add_parser("solve", parents=[common], help="solve for one front")
    g = f.add_mutually_exclusive_group()
    g.add_argument("--epsilon", dest="f_epsilon", type=str)
    g.add_argument("--lambda", dest="f_lambda", type=str)
    f.add_argument("--L", type=str)
    f.add_argument("--nx", type=str)
    f.add_argument("--ny", dest="f_ny", type=str)
    f.add_argument("--bc", choices=["dirichlet", "neumann"])

    br = sub.add_parser("branch", parents=[common]).add_subparsers(dest="action", required=True)
    c = br.add_parser("continue", parents=[common], help="trace the branch")
    c.add_argument("--epsilon", dest="b_epsilon", type=str)
    c.add_argument("--steps", type=str)
    c.add_argument("--ds", type=str)
    c.add_argument("--ds-max", dest="ds_max", type=str)
    c.add_argument("--ny", dest="b_ny", type=str)

    ver = sub.add_parser("verify", parents=[common]).add_subparsers(dest="action", required=True)
    v = ver.add_parser("all", parents=[common], help="run the acceptance checks")
    v.add_argument("--only", type=str, help="comma-separated criterion numbers")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = getattr(args, "out", ".")
    os.makedirs(out, exist_ok=True)
    try:
        cfg = load_config(getattr(args, "config", None))
        for dest, (section, key) in OVERRIDES.items():
            raw = getattr(args, dest, None)
            if raw is not None:
                cfg.set(section, key, raw)
        handler = COMMANDS[(args.group, getattr(args, "action", None))]
        return handler(cfg, out)
    except ConfigError as exc:
        dump_json(os.path.join(out, "error.json"), {"error": "usage", "message": str(exc)})
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AntiplaneError as exc:
        dump_json(os.path.join(out, "error.json"), {"error": type(exc).__name__, "message": str(exc)})
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
