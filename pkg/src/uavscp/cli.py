"""Command-line front end: LoS fitting, single-point SCP, sweeps, simulation, validation.

Exit codes: 0 success, 1 a validation check failed, 2 bad configuration or
arguments, 3 a numerical routine did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import analytic, los, mc, validation
from .scene import ENVIRONMENTS, ConfigError, NetworkConfig, config_from_dict, config_to_dict

EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3

SWEEP_VARIABLES = ("pj", "ps_over_pj", "h", "l_tj", "jammer_xy_grid", "r1", "n")
SWEEP_COLUMNS = (
    "index", "variable", "value", "jammer_x_m", "jammer_y_m", "ps_w", "pj_w", "h_m", "l_tj_m",
    "r1_m", "n_eves", "regime", "scp_analytic", "quad_error", "scp_mc", "mc_ci_low",
    "mc_ci_high", "mc_trials", "seed",
)
FIT_COLUMNS = (
    "environment", "c1", "c2", "c3", "c4", "root_sign", "l1_over_h", "l2_over_h", "l3_over_h",
    "sigmoid_b", "sigmoid_c", "rmse_piecewise", "rmse_sigmoid", "rmse_ratio",
)


def fmt(x: Any) -> Any:
    """Round floats to 12 significant digits for output.

    A ``config`` entry is left at full precision so it reloads exactly.
    """
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if not math.isfinite(x) or x == 0.0 else float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: v if k == "config" else fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


class NumericsError(RuntimeError):
    pass


# -- config handling ---------------------------------------------------------

def build_config(args: argparse.Namespace) -> NetworkConfig:
    data: dict[str, Any] = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    for item in getattr(args, "set", None) or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        try:
            data[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            data[key.strip()] = raw
    for flag, key in (("tx_gain_db", "tx_gain_db"), ("rx_gain_db", "rx_gain_db"),
                      ("coding_gain_db", "coding_gain_db"), ("noise_figure_db", "noise_figure_db")):
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    return config_from_dict(data)


def los_model(cfg: NetworkConfig, choice: str, samples: int = los.DEFAULT_SAMPLES) -> los.PiecewiseLoS:
    """Published coefficients for preset environments, or a fresh fit."""
    if choice == "reference" and cfg.environment.name in los.REFERENCE_FITS:
        if ENVIRONMENTS.get(cfg.environment.name) == cfg.environment:
            return los.reference_fit(cfg.environment.name)
    return los.fit_piecewise(cfg.environment, samples)


def emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if row.get(k) is None else fmt(row.get(k)) for k in columns})
    return buf.getvalue()


def to_json(obj: Any) -> str:
    return json.dumps(fmt(obj), indent=2) + "\n"


# -- fit-los -------------------------------------------------------------------

def fit_row(report: los.FitReport) -> dict[str, Any]:
    p = report.piecewise
    l1, l2, l3 = p.breakpoints(1.0)
    return {
        "environment": report.environment, "c1": p.c1, "c2": p.c2, "c3": p.c3, "c4": p.c4,
        "root_sign": p.root_sign, "l1_over_h": l1, "l2_over_h": l2, "l3_over_h": l3,
        "sigmoid_b": report.sigmoid.b_coef, "sigmoid_c": report.sigmoid.c_coef,
        "rmse_piecewise": report.rmse_piecewise, "rmse_sigmoid": report.rmse_sigmoid,
        "rmse_ratio": report.rmse_sigmoid / report.rmse_piecewise,
    }


def cmd_fit_los(args: argparse.Namespace) -> int:
    names = sorted(ENVIRONMENTS) if args.env == "all" else [args.env]
    rows = []
    for name in names:
        try:
            env = ENVIRONMENTS[name]
        except KeyError:
            raise ConfigError(f"unknown environment {name!r}; choose from {sorted(ENVIRONMENTS)} or 'all'") from None
        rows.append(fit_row(los.fit_report(env, args.samples)))
    if args.format == "csv":
        emit(to_csv(rows, FIT_COLUMNS), args.out)
    else:
        emit(to_json(rows if len(rows) > 1 else rows[0]), args.out)
    return 0


# -- scp / simulate ------------------------------------------------------------------

def cmd_scp(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if args.interference_limited:
        cfg = analytic.interference_limited(cfg)
    p = los_model(cfg, args.los)
    try:
        res = analytic.scp(cfg, p)
    except (analytic.ConvergenceError, ArithmeticError) as exc:
        raise NumericsError(f"scp did not converge: {exc}") from None
    out: dict[str, Any] = {
        "scp": res.scp,
        "lower_bound": res.lower_bound,
        "regime": res.regime,
        "gamma1_truncation": res.gamma1_truncation,
        "quadrature_error_estimate": res.quadrature_error_estimate,
        "los_coefficients": {"c1": p.c1, "c2": p.c2, "c3": p.c3, "c4": p.c4, "root_sign": p.root_sign},
    }
    if args.mc:
        mode = "interference-limited" if args.interference_limited else "with-noise"
        est = mc.simulate_scp(cfg, p, args.trials, mode=mode, seed=args.seed, workers=args.workers)
        out["mc"] = {"scp": est.scp, "ci_low": est.ci_low, "ci_high": est.ci_high,
                     "trials": est.trials, "seed": args.seed}
    out["config"] = config_to_dict(cfg)
    emit(to_json(out), args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    p = los_model(cfg, args.los) if args.los_mode == "piecewise" else None
    est = mc.simulate_scp(cfg, p, args.trials, mode=args.mode, los_mode=args.los_mode,
                          seed=args.seed, workers=args.workers)
    out = {"scp": est.scp, "ci_low": est.ci_low, "ci_high": est.ci_high, "trials": est.trials,
           "secure": est.secure, "seed": args.seed, "mode": args.mode, "los_mode": args.los_mode,
           "config": config_to_dict(cfg)}
    emit(to_json(out), args.out)
    return 0


# -- sweep ---------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple[float, ...]
    outputs: str = "analytic"
    y_grid: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if self.outputs not in ("analytic", "mc", "both"):
            raise ConfigError(f"outputs must be analytic, mc or both, got {self.outputs!r}")
        _check_grid(self.grid, "grid")
        if self.variable == "jammer_xy_grid":
            _check_grid(self.y_grid, "y grid")
        if self.variable == "n" and any(int(v) != v or v < 1 for v in self.grid):
            raise ConfigError("grid for n must hold positive integers")

    def points(self) -> list[tuple[float, float | None]]:
        if self.variable == "jammer_xy_grid":
            return [(x, y) for y in self.y_grid for x in self.grid]
        return [(v, None) for v in self.grid]


def _check_grid(grid: Sequence[float], label: str) -> None:
    if len(grid) == 0:
        raise ConfigError(f"sweep {label} is empty")
    d = np.diff(np.asarray(grid, dtype=float))
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ConfigError(f"sweep {label} must be strictly monotone")


def parse_grid(values: str | None, logspace: Sequence[float] | None,
               linspace: Sequence[float] | None) -> tuple[float, ...]:
    given = [x is not None for x in (values, logspace, linspace)]
    if sum(given) != 1:
        raise ConfigError("give exactly one of --values, --logspace, --linspace")
    if values is not None:
        try:
            return tuple(float(v) for v in values.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"--values must be comma-separated numbers, got {values!r}") from None
    lo, hi, num = logspace if logspace is not None else linspace
    if int(num) != num or num < 1:
        raise ConfigError("grid point count must be a positive integer")
    if logspace is not None:
        return tuple(float(v) for v in np.logspace(lo, hi, int(num)))
    return tuple(float(v) for v in np.linspace(lo, hi, int(num)))


def apply_point(cfg: NetworkConfig, variable: str, x: float, y: float | None) -> NetworkConfig:
    if variable == "pj":
        return cfg.replace(pj_w=x)
    if variable == "ps_over_pj":
        return cfg.replace(pj_w=cfg.ps_w / x)
    if variable == "h":
        return cfg.replace(h_m=x)
    if variable == "l_tj":
        return cfg.replace(l_tj_m=x)
    if variable == "r1":
        return cfg.replace(r1_m=x)
    if variable == "n":
        return cfg.replace(n_eves=int(x))
    return cfg.replace(l_tj_m=math.hypot(x, y), phi_jp=math.atan2(y, x))


@dataclass(frozen=True)
class _PointJob:
    index: int
    cfg: NetworkConfig
    spec: SweepSpec
    x: float
    y: float | None
    p: los.PiecewiseLoS
    mode: str
    trials: int
    seed: int


def run_point(job: _PointJob) -> dict[str, Any]:
    """Evaluate one grid point; errors come back as a row with an ``error`` key."""
    row: dict[str, Any] = {"index": job.index, "variable": job.spec.variable, "seed": job.seed}
    if job.y is None:
        row["value"] = job.x
    else:
        row["jammer_x_m"], row["jammer_y_m"] = job.x, job.y
    try:
        cfg = apply_point(job.cfg, job.spec.variable, job.x, job.y)
    except ConfigError as exc:
        row["error"] = f"invalid point: {exc}"
        return row
    row.update(ps_w=cfg.ps_w, pj_w=cfg.pj_w, h_m=cfg.h_m, l_tj_m=cfg.l_tj_m, r1_m=cfg.r1_m,
               n_eves=cfg.n_eves)
    if job.mode == "interference-limited":
        cfg = analytic.interference_limited(cfg)
    if job.spec.outputs in ("analytic", "both"):
        try:
            res = analytic.scp(cfg, job.p)
        except (analytic.ConvergenceError, ArithmeticError) as exc:
            row["error"] = f"did not converge: {exc}"
            return row
        row.update(scp_analytic=res.scp, quad_error=res.quadrature_error_estimate, regime=res.regime)
    if job.spec.outputs in ("mc", "both"):
        # each point uses the same seed so neighbouring points share random numbers
        est = mc.simulate_scp(cfg, job.p, job.trials, mode=job.mode, seed=job.seed, workers=1)
        row.update(scp_mc=est.scp, mc_ci_low=est.ci_low, mc_ci_high=est.ci_high, mc_trials=est.trials)
    return row


def run_sweep(cfg: NetworkConfig, spec: SweepSpec, p: los.PiecewiseLoS, *, mode: str = "with-noise",
              trials: int = 100_000, seed: int = 0, workers: int | None = None) -> list[dict[str, Any]]:
    jobs = [_PointJob(i, cfg, spec, x, y, p, mode, trials, seed) for i, (x, y) in enumerate(spec.points())]
    workers = mc.default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        return [run_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(run_point, jobs))


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    grid = parse_grid(args.values, args.logspace, args.linspace)
    y_grid: tuple[float, ...] = ()
    if args.variable == "jammer_xy_grid":
        y_grid = parse_grid(args.y_values, args.y_logspace, args.y_linspace)
    spec = SweepSpec(args.variable, grid, args.outputs, y_grid)
    p = los_model(cfg, args.los)
    rows = run_sweep(cfg, spec, p, mode=args.mode, trials=args.trials, seed=args.seed, workers=args.workers)
    if args.format == "csv":
        emit(to_csv(rows, SWEEP_COLUMNS), args.out)
    else:
        emit(to_json({"config": config_to_dict(cfg), "variable": spec.variable, "outputs": spec.outputs,
                      "mode": args.mode, "rows": rows}), args.out)
    bad = [r for r in rows if "error" in r]
    if bad:
        r = bad[0]
        where = r.get("value", (r.get("jammer_x_m"), r.get("jammer_y_m")))
        raise NumericsError(f"grid point {r['index']} ({spec.variable}={where}): {r['error']}")
    return 0


# -- validate ----------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    p = los_model(cfg, args.los)

    def progress(c: validation.Check) -> None:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: {c.value:.3g} (limit {c.threshold:g}, {c.seconds:.1f} s)", file=sys.stderr)

    checks = validation.run_all(cfg, p, seed=args.seed, progress=progress)
    report = {"seed": args.seed, "passed": all(c.passed for c in checks),
              "checks": [{"name": c.name, "passed": c.passed, "value": c.value,
                          "threshold": c.threshold, "seconds": c.seconds, "detail": c.detail}
                         for c in checks]}
    emit(to_json(report), args.out)
    return 0 if report["passed"] else EXIT_CHECK_FAILED


# -- parser --------------------------------------------------------------------

def _config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON scenario file (defaults to the built-in scenario)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config field, e.g. --set h_m=1000 (repeatable)")
    p.add_argument("--tx-gain-db", type=float)
    p.add_argument("--rx-gain-db", type=float)
    p.add_argument("--coding-gain-db", type=float)
    p.add_argument("--noise-figure-db", type=float)
    p.add_argument("--los", choices=("reference", "fitted"), default="reference",
                   help="piecewise LoS coefficients: published table or a fresh fit")
    p.add_argument("--out", help="output path (default stdout)")


def _mc_args(p: argparse.ArgumentParser, trials: int = 100_000) -> None:
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker count (default from {mc.THREADS_ENV} or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavscp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit-los", help="fit the piecewise LoS model for an environment")
    f.add_argument("env", help=f"one of {sorted(ENVIRONMENTS)} or 'all'")
    f.add_argument("--samples", type=int, default=los.DEFAULT_SAMPLES)
    f.add_argument("--format", choices=("json", "csv"), default="json")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit_los)

    s = sub.add_parser("scp", help="analytic SCP at one scenario")
    _config_args(s)
    _mc_args(s)
    s.add_argument("--mc", action="store_true", help="also run a Monte Carlo check")
    s.add_argument("--interference-limited", action="store_true", help="drop receiver noise")
    s.set_defaults(func=cmd_scp)

    w = sub.add_parser("sweep", help="evaluate SCP over a one- or two-dimensional grid")
    _config_args(w)
    _mc_args(w)
    w.add_argument("--variable", required=True, choices=SWEEP_VARIABLES)
    w.add_argument("--values", help="comma-separated grid")
    w.add_argument("--logspace", type=float, nargs=3, metavar=("LO_EXP", "HI_EXP", "NUM"))
    w.add_argument("--linspace", type=float, nargs=3, metavar=("LO", "HI", "NUM"))
    w.add_argument("--y-values", help="second axis for jammer_xy_grid")
    w.add_argument("--y-logspace", type=float, nargs=3, metavar=("LO_EXP", "HI_EXP", "NUM"))
    w.add_argument("--y-linspace", type=float, nargs=3, metavar=("LO", "HI", "NUM"))
    w.add_argument("--outputs", choices=("analytic", "mc", "both"), default="analytic")
    w.add_argument("--mode", choices=mc.MODES, default="with-noise")
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    w.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", help="Monte Carlo SCP estimate")
    _config_args(m)
    _mc_args(m)
    m.add_argument("--mode", choices=mc.MODES, default="with-noise")
    m.add_argument("--los-mode", choices=mc.LOS_MODES, default="piecewise")
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("validate", help="run the closed-form oracle suite")
    _config_args(v)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        mc.default_workers()
    except ValueError as exc:
        print(f"uavscp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"uavscp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except los.FitError as exc:
        print(f"uavscp: fit failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except NumericsError as exc:
        print(f"uavscp: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
