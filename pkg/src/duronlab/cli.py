"""Command-line runner.

Every subcommand writes a JSON report ``{config, checks, summary}`` (or CSV
with ``--format csv``) and exits 0 when all checks pass, 1 when some fail and
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from duronlab import ccr, moyal, suites, thermofield
from duronlab import process_parser as pp
from duronlab.config import ConfigError, build_config, coerce, load_config, parse_sweep
from duronlab.report import PLUMBING, Check, anchor_coverage, apply_tolerances, build_report, check_in, dumps

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
# ``--tol adequacy=...`` sets the theta-vacuum cutoff rule rather than a check tolerance
ADEQUACY_KEY = "adequacy"
SUPEROPS_MAX_N = 16


def _tol_arg(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected name=value")
    name, value = text.split("=", 1)
    return name.strip(), value.strip()


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, help="Fock cutoff or system size")
    p.add_argument("--seed", type=int, help="64-bit seed (default 0)")
    p.add_argument("--tol", type=_tol_arg, action="append", default=[], metavar="NAME=VALUE",
                   help="override a check tolerance; VALUE is a number or lo:hi")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--config", help="flat key = value file; command-line flags win")
    p.add_argument("--timing", action="store_true", default=None, help="record runtime_ms in the report")
    p.add_argument("--jobs", type=int, help="worker processes for independent suites")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="duronlab", description="Numerical and symbolic checks for the doubled-time algebra.")
    sub = ap.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", parents=[common], help="process algebra and CCR kernel")
    alg.add_argument("action", nargs="?", default="suite", choices=("suite", "eval", "table"))
    alg.add_argument("expr", nargs="?", help="bracket expression for 'eval', preset name for 'table'")

    bc = sub.add_parser("bilocal-classical", parents=[common], help="two-point Hamilton-Jacobi checks")
    bc.add_argument("--system", choices=("free", "oscillator"))
    bc.add_argument("--grid", help="sweep of the end point x2 as a:b:steps")
    bc.add_argument("--dt", type=float)
    bc.add_argument("--h", type=float)

    bq = sub.add_parser("bilocal-quantum", parents=[common], help="two-time density and quantum HJ")
    bq.add_argument("--system", choices=("random", "oscillator", "free", "grid1d"))
    bq.add_argument("--h", type=float)
    bq.add_argument("--dx", type=float)
    bq.add_argument("--dt", type=float)

    mo = sub.add_parser("moyal", parents=[common], help="star product and brackets")
    mo.add_argument("action", nargs="?", default="suite", choices=("suite", "bracket"))
    mo.add_argument("--f")
    mo.add_argument("--g")
    mo.add_argument("--kind", choices=("star", "moyal", "baker", "poisson", "limit"), default="moyal")

    sub.add_parser("superops", parents=[common], help="Liouville and energy super-operators")

    th = sub.add_parser("thermofield", parents=[common], help="theta-vacua, Gibbs and Bogoliubov")
    th.add_argument("--theta", type=float)
    th.add_argument("--theta-sweep", dest="theta_sweep")
    th.add_argument("--beta", type=float)
    th.add_argument("--omega", type=float)

    sub.add_parser("verify-all", parents=[common], help="every suite plus anchor coverage")
    return ap


# -- config ----------------------------------------------------------------------

_SUBCOMMAND_SUITES = {
    "algebra": ("algebra", "ccr"),
    "bilocal-classical": ("bilocal-classical",),
    "bilocal-quantum": ("bilocal-quantum",),
    "moyal": ("moyal",),
    "superops": ("superops",),
    "thermofield": ("thermofield",),
    "verify-all": tuple(suites.SUITES),
}


def make_config(args):
    file_values = load_config(args.config) if args.config else {}
    overrides = {k: getattr(args, k, None) for k in
                 ("n", "seed", "format", "out", "timing", "jobs", "theta", "theta_sweep", "beta", "omega",
                  "h", "dx", "dt", "grid", "system")}
    overrides["suites"] = _SUBCOMMAND_SUITES[args.command]
    if args.command == "verify-all" and "suites" in file_values:
        overrides["suites"] = file_values["suites"]
    tol = {k[4:]: v for k, v in file_values.items() if k.startswith("tol.")}
    for name, value in args.tol:
        tol[name] = coerce("tol." + name, value, f"tol.{name}")
    file_values = {k: v for k, v in file_values.items() if not k.startswith("tol.") and k != "suites"}
    overrides["tol"] = tol
    return build_config(file_values, overrides)


def suite_params(cfg, suite: str, command: str) -> dict:
    """Translate config fields into the parameter names each suite reads."""
    p = {"seed": cfg.seed}
    if suite == "thermofield":
        if cfg.n is not None:
            p["n"] = cfg.n
        if cfg.theta is not None:
            p["theta"] = cfg.theta
        p["omega"] = cfg.omega
        if cfg.beta is not None:
            p["betas"] = str(cfg.beta * cfg.omega)
    elif suite == "bilocal-classical" and cfg.h is not None:
        p["h"] = cfg.h
    elif suite == "bilocal-quantum":
        if cfg.h is not None:
            p["hq"] = cfg.h
        if cfg.dx is not None:
            p["dx"] = cfg.dx
        if cfg.dt is not None:
            p["dt"] = cfg.dt
        if command == "bilocal-quantum" and cfg.n is not None:
            p["levels"] = cfg.n
    elif suite == "superops" and command == "superops" and cfg.n is not None:
        if cfg.n > SUPEROPS_MAX_N:
            raise ConfigError("config.n", f"superops diagonalises dense N^2 matrices for every N <= n; "
                                          f"n must be <= {SUPEROPS_MAX_N}, got {cfg.n}")
        p["max_n"] = cfg.n
    return p


def _run_one(job):
    name, params = job
    return suites.run_suite(name, params)


def run_suites(cfg, command: str) -> list[Check]:
    jobs = [(name, suite_params(cfg, name, command)) for name in cfg.suites]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    # assembly is serial and in suite order, so reports do not depend on scheduling
    return [c for block in results for c in block]


# -- output ----------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def checks_to_rows(checks) -> list[dict]:
    return [{"name": c.name, "paper_anchor": c.paper_anchor, "value": c.value, "tolerance": c.tolerance,
             "pass": c.passed} for c in checks]


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit(cfg, checks, started: float, rows: list[dict] | None = None) -> int:
    unused = apply_tolerances(checks, {k: v for k, v in cfg.tol.items() if k != ADEQUACY_KEY})
    if unused:
        raise ConfigError(f"tol.{unused[0]}", "matches no check with a numeric tolerance")
    runtime = round((time.perf_counter() - started) * 1000, 3) if cfg.timing else None
    report = build_report(cfg.report_dict(), checks, runtime)
    text = dumps(report) + "\n"
    if cfg.format == "csv":
        _write(rows_to_csv(rows if rows is not None else checks_to_rows(checks)), cfg.out)
        # the JSON summary travels alongside the CSV
        if cfg.out:
            _write(text, cfg.out + ".json")
        else:
            sys.stderr.write(text)
    else:
        _write(text, cfg.out)
    failing = report["summary"]["failing"]
    if failing:
        sys.stderr.write("failing checks: " + ", ".join(failing) + "\n")
        return EXIT_FAIL
    return EXIT_OK


# -- subcommands -------------------------------------------------------------------

def cmd_algebra(args, cfg, started):
    if args.action == "eval":
        if not args.expr:
            raise ConfigError("expr", "eval needs an expression")
        try:
            print(pp.evaluate(args.expr).pretty())
        except pp.ParseError as exc:
            raise ConfigError("expr", str(exc)) from None
        except Exception as exc:  # undefined composition and friends
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        return EXIT_OK
    if args.action == "table":
        name = args.expr or "paper-doubling"
        try:
            rep = ccr.verify_table(name)
        except ccr.PresetError as exc:
            raise ConfigError("preset", str(exc)) from None
        print(rep.dumps())
        return EXIT_OK if rep.passed else EXIT_FAIL
    return emit(cfg, run_suites(cfg, "algebra"), started)


def cmd_classical(args, cfg, started):
    if cfg.grid is None and cfg.system is None:
        return emit(cfg, run_suites(cfg, "bilocal-classical"), started)
    system = cfg.system or "oscillator"
    a, b, steps = parse_sweep(cfg.grid or "-1:1:5", "config.grid")
    h = cfg.h or suites.DEFAULTS["h"]
    rows = suites.classical_grid(system, a, b, steps, cfg.dt, h)
    half = suites.classical_grid(system, a, b, steps, cfg.dt, h / 2)
    vals = [abs(v) for r in rows for k, v in r.items() if k != "x2"]
    worst, mean = max(vals), sum(vals) / len(vals)
    worst_half = max(abs(v) for r in half for k, v in r.items() if k != "x2")
    ratio = worst / worst_half if worst_half else math.inf
    checks = [Check(f"classical.{system}.grid_max", "two-point-hj", worst, 1e-5, worst <= 1e-5,
                    {"points": len(rows), "mean_residual": mean, "h": h}),
              check_in(f"classical.{system}.grid_convergence", "two-point-hj", ratio, 3.5, 4.5)]
    return emit(cfg, checks, started, rows)


def cmd_quantum(args, cfg, started):
    system = cfg.system
    if system in (None, "random"):
        return emit(cfg, run_suites(cfg, "bilocal-quantum"), started)
    if system == "oscillator":
        rng = suites.suite_rng(cfg.seed, "bilocal-quantum")
        return emit(cfg, suites.oscillator_levels(cfg.n or 8, rng, cfg.h or 1e-4), started)
    dx, dt = cfg.dx or 0.01, cfg.dt or 1e-4
    rows, worst = suites.qhj_profile("free" if system == "free" else "oscillator", dx, dt)
    tol = suites.QHJ_CONVERGENCE_FLOOR if system == "free" else 1e-4
    checks = [Check(f"quantum.qhj.{system}", "quantum-hj", worst, tol, worst <= tol, {"dx": dx, "dt": dt})]
    return emit(cfg, checks, started, rows)


_MOYAL_KINDS = {
    "star": moyal.star,
    "moyal": moyal.moyal_bracket,
    "baker": moyal.baker_bracket,
    "poisson": moyal.poisson_bracket,
}


def cmd_moyal(args, cfg, started):
    if args.action == "suite":
        return emit(cfg, run_suites(cfg, "moyal"), started)
    if args.f is None or args.g is None:
        raise ConfigError("f" if args.f is None else "g", "bracket needs --f and --g")
    try:
        f, g = moyal.parse_poly(args.f), moyal.parse_poly(args.g)
    except ValueError as exc:
        raise ConfigError("f/g", str(exc)) from None
    if args.kind == "limit":
        print(json.dumps(moyal.classical_limit_report(f, g).to_json(), indent=2))
    else:
        out = _MOYAL_KINDS[args.kind](f, g)
        print(moyal.format_poly(out))
        print(json.dumps(out.to_json()))
    return EXIT_OK


def cmd_superops(args, cfg, started):
    return emit(cfg, run_suites(cfg, "superops"), started)


def cmd_thermofield(args, cfg, started):
    adequacy = cfg.tol.get(ADEQUACY_KEY, thermofield.ADEQUACY_TOL)
    n = cfg.n or 60
    try:
        if cfg.theta_sweep is not None:
            a, b, steps = parse_sweep(cfg.theta_sweep, "config.theta_sweep")
            rows = suites.thermofield_sweep(a, b, steps, n, adequacy)
            worst = max(r["bogoliubov_residual"] for r in rows)
            checks = [Check("thermofield.sweep_vacuum_annihilation", "bogoliubov-transform", worst, 1e-6,
                            worst <= 1e-6, {"points": len(rows)})]
            return emit(cfg, checks, started, rows)
        if cfg.theta is not None:
            return emit(cfg, suites.thermofield_point(cfg.theta, n, cfg.beta, cfg.omega, adequacy), started)
    except thermofield.CutoffError as exc:
        raise ConfigError("config.n", str(exc)) from None
    return emit(cfg, run_suites(cfg, "thermofield"), started)


def cmd_verify_all(args, cfg, started):
    checks = run_suites(cfg, "verify-all")
    missing = anchor_coverage(checks)
    checks.append(Check("report.anchor_coverage", PLUMBING, len(missing), 0, not missing, {"missing": missing}))
    return emit(cfg, checks, started)


COMMANDS = {
    "algebra": cmd_algebra,
    "bilocal-classical": cmd_classical,
    "bilocal-quantum": cmd_quantum,
    "moyal": cmd_moyal,
    "superops": cmd_superops,
    "thermofield": cmd_thermofield,
    "verify-all": cmd_verify_all,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](args, cfg, started)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
