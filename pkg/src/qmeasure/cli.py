"""Command-line front end.

Exit codes: 0 success, 1 numerical or statistical failure, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .calibration import fit_gamma, fit_lambda
from .config import ScenarioConfig, SamplingConfig, load_config
from .errors import (
    CalibrationError,
    ConfigError,
    GridTooSmallError,
    InvalidBoundsError,
    InvalidSpecError,
    QMeasureError,
    UnderResolvedKernelError,
)
from .pipeline import evaluate, oracle_params, sample_scenario, verify_scenario

log = logging.getLogger("qmeasure")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DEFAULT_SWEEP = (0.0, 0.25, 0.5)
CSV_HEADER = "x,rho_in,j_in,rho_out,j_out"
CONFIG_ERRORS = (ConfigError, InvalidSpecError, InvalidBoundsError, GridTooSmallError, UnderResolvedKernelError)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _out_dir(args, cfg: ScenarioConfig) -> Path:
    target = args.out_dir or cfg.output_dir or "out"
    path = Path(target)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _sweep_pairs(cfg: ScenarioConfig) -> list[tuple[float, float]]:
    gammas = cfg.sweep_gamma or DEFAULT_SWEEP
    lambdas = cfg.sweep_lambda or DEFAULT_SWEEP
    return [(g, l) for g in gammas for l in lambdas]


def cmd_run(cfg: ScenarioConfig, args) -> int:
    result = evaluate(cfg)
    out = _out_dir(args, cfg)
    np.savetxt(out / "fields.csv", result.field_table(), fmt="%.17g", delimiter=",", header=CSV_HEADER, comments="")
    report = result.report()
    _write_json(out / "report.json", report)
    log.info("run: %s (ideal=%s) -> %s", report["status"], result.ideal, out)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_verify(cfg: ScenarioConfig, args) -> int:
    if cfg.sweep_gamma or cfg.sweep_lambda:
        pairs = _sweep_pairs(cfg)
    else:
        pairs = [(cfg.gamma, cfg.lam)]
    rows = [verify_scenario(cfg.with_widths(g, l)) for g, l in pairs]
    passed = all(r["passed"] for r in rows)
    out = _out_dir(args, cfg)
    _write_json(out / "verify.json", {"passed": passed, "scenarios": rows})
    for r in rows:
        worst = max((c["defect"] / c["tol"] for c in r["comparisons"]), default=float("nan"))
        log.info("verify gamma=%g lambda=%g: %s (worst defect/tol %.3g)", r["gamma"], r["lambda"],
                 "pass" if r["passed"] else "FAIL", worst)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_sample(cfg: ScenarioConfig, args) -> int:
    if cfg.sampling is None:
        raise ConfigError("the sample command needs a sampling.* block")
    report = sample_scenario(cfg, cfg.sampling.seed)
    out = _out_dir(args, cfg)
    _write_json(out / "sample.json", report)
    log.info("sample: %s", "pass" if report["passed"] else "FAIL")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _sweep_row(cfg: ScenarioConfig) -> dict:
    row = {"gamma": cfg.gamma, "lambda": cfg.lam}
    try:
        result = evaluate(cfg)
    except QMeasureError as exc:
        row.update(ok=False, error=str(exc))
        return row
    rep = result.report()
    ind = result.indicators
    row.update(
        eps_std_x=ind.eps_std_x,
        eps_std_p=ind.eps_std_p,
        w=ind.w,
        rsur_in=rep["rsur"]["in_margin"],
        rsur_out=rep["rsur"]["out_margin"],
        ok=result.passed,
        error="",
    )
    return row


def cmd_sweep(cfg: ScenarioConfig, args) -> int:
    configs = [cfg.with_widths(g, l) for g, l in _sweep_pairs(cfg)]
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(_sweep_row, configs))
    out = _out_dir(args, cfg)
    columns = ["gamma", "lambda", "eps_std_x", "eps_std_p", "w", "rsur_in", "rsur_out", "ok", "error"]
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for c in columns:
            v = row.get(c, "")
            cells.append(f"{v:.17g}" if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    passed = all(r["ok"] for r in rows)
    _write_json(out / "sweep.json", {"passed": passed, "rows": rows})
    return EXIT_OK if passed else EXIT_FAIL


def cmd_calibrate(cfg: ScenarioConfig, args) -> int:
    if cfg.observed_std_x is None:
        raise ConfigError("the calibrate command needs calibrate.std_x_out")
    params = oracle_params(cfg)
    fitted = {"gamma": fit_gamma(cfg.observed_std_x, params.sigma)}
    if cfg.observed_std_p is not None:
        base = replace(params, gamma=fitted["gamma"], lam=0.0)
        fitted["lambda"] = fit_lambda(cfg.observed_std_p, base, cfg.branch)
    out = _out_dir(args, cfg)
    _write_json(out / "calibrate.json", {"observed": {"std_x_out": cfg.observed_std_x,
                                                      "std_p_out": cfg.observed_std_p},
                                         "fitted": fitted})
    log.info("calibrate: %s", fitted)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "sweep": cmd_sweep,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmeasure", description="Quantum measurement as density/current transforms.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="scenario config file (section.key = value)")
    parser.add_argument("--out-dir", default=None, help="output directory (default ./out)")
    parser.add_argument("--seed", type=int, default=None, help="override sampling.seed")
    parser.add_argument("--grid-points", type=int, default=None, help="override grid.n")
    parser.add_argument("-q", "--quiet", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, sampling=replace(cfg.sampling or SamplingConfig(), seed=args.seed))
        if args.grid_points is not None:
            if args.grid_points < 16:
                raise ConfigError("--grid-points must be at least 16")
            cfg = replace(cfg, grid_n=args.grid_points)
        return COMMANDS[args.command](cfg, args)
    except CONFIG_ERRORS as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except CalibrationError as exc:
        log.error("calibration failed: %s", exc)
        return EXIT_CONFIG
    except QMeasureError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
