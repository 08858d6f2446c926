"""Batch driver: parameter sweeps over both engines, CSV + manifest output.

Subcommands mirror the evaluation axes: ``association``, ``coverage-tbs``,
``coverage-noma``, ``rate``, and ``validate`` (cross-engine tolerance
check, nonzero exit on any breach).  A sweep is ``--sweep name=start:stop:step``
over any numeric scenario field or over the virtual threshold fields
``eps_dB`` / ``nu_dB``.  Every CSV row carries the analytical and Monte
Carlo values for the same parameter point plus engine timings; a manifest
records the config, seed, versions and git state for reproducibility.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import subprocess
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .association import assoc_all
from .coverage import NomaThresholds, coverage_noma_tier, coverage_tbs
from .params import NetworkParams
from .rate import rate_noma_tier, rate_tbs
from .simulator import simulate_records, summarize

_VIRTUAL_FIELDS = ("eps_dB", "eps_f_dB", "eps_t_dB", "nu_dB")


def parse_sweep(spec: str):
    """``name=start:stop:step`` -> (name, inclusive value list)."""
    try:
        name, rng = spec.split("=", 1)
        start, stop, step = (float(tok) for tok in rng.split(":"))
    except ValueError:
        raise SystemExit(f"bad sweep spec {spec!r}; expected name=start:stop:step")
    if step <= 0 or stop < start:
        raise SystemExit(f"bad sweep range in {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = [start + i * step for i in range(count)]
    param_names = {f.name for f in fields(NetworkParams)}
    if name not in param_names and name not in _VIRTUAL_FIELDS:
        raise SystemExit(f"unknown sweep field {name!r}")
    return name, values


def apply_sweep(params: NetworkParams, name: str, value: float,
                eps_f_db: float, eps_t_db: float, nu_db: float):
    """One sweep point: updated (params, eps_f_dB, eps_t_dB, nu_dB)."""
    if name == "eps_dB":
        return params, value, value, nu_db
    if name == "eps_f_dB":
        return params, value, eps_t_db, nu_db
    if name == "eps_t_dB":
        return params, eps_f_db, value, nu_db
    if name == "nu_dB":
        return params, eps_f_db, eps_t_db, value
    if name in ("m_N", "m_L", "m_T", "N_T"):
        value = int(round(value))
    if name == "h":
        # the paired-UE distance is defined relative to the altitude; keep
        # the configured ratio so the R_f >= h invariant survives the sweep
        return (params.replace(h=value, R_f=value * params.R_f / params.h),
                eps_f_db, eps_t_db, nu_db)
    return params.replace(**{name: value}), eps_f_db, eps_t_db, nu_db


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def write_manifest(path: Path, args, params: NetworkParams, sweep_name, sweep_values):
    config = params.to_dict()
    blob = json.dumps(config, sort_keys=True).encode()
    lines = [
        "# run manifest",
        f"tool_version: {__version__}",
        f"numpy_version: {np.__version__}",
        f"python_version: {sys.version.split()[0]}",
        f"git_describe: {_git_describe()}",
        f"subcommand: {args.command}",
        f"seed: {args.seed}",
        f"trials: {args.trials}",
        f"config_sha256: {hashlib.sha256(blob).hexdigest()}",
        f"sweep: {sweep_name}={sweep_values!r}" if sweep_name else "sweep: none",
        "config:",
    ]
    lines += [f"  {k}: {_fmt(v) if isinstance(v, float) else v}"
              for k, v in config.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _sweep_points(params, args):
    if args.sweep:
        name, values = parse_sweep(args.sweep)
    else:
        name, values = None, [None]
    for value in values:
        point = (params, args.eps_f_db, args.eps_t_db, args.nu_db)
        if name is not None:
            point = apply_sweep(params, name, value, args.eps_f_db,
                                args.eps_t_db, args.nu_db)
        yield value, point


def cmd_association(params, args, out_dir: Path) -> int:
    rows = []
    for value, (pp, _, _, _) in _sweep_points(params, args):
        t0 = time.perf_counter()
        probs = assoc_all(pp)
        t_an = time.perf_counter() - t0
        t0 = time.perf_counter()
        rec = simulate_records(pp, args.trials, args.seed, workers=args.workers,
                               fading=False)
        summ = summarize(rec, pp, NomaThresholds.from_db(args.eps_f_db, args.eps_t_db))
        t_mc = time.perf_counter() - t0
        rows.append([value, probs.A_T, probs.A_L, probs.A_N,
                     summ.tbs.association.value, summ.los.association.value,
                     summ.nlos.association.value, summ.tbs.association.se,
                     summ.los.association.se, summ.nlos.association.se,
                     t_an, t_mc])
    _write_csv(out_dir / "association.csv",
               ["sweep_value", "A_T", "A_L", "A_N", "mc_A_T", "mc_A_L", "mc_A_N",
                "se_A_T", "se_A_L", "se_A_N", "t_analytic_s", "t_mc_s"], rows)
    return 0


def cmd_coverage_tbs(params, args, out_dir: Path) -> int:
    rows = []
    for value, (pp, ef, et, nu_db) in _sweep_points(params, args):
        nu = 10.0 ** (nu_db / 10.0)
        t0 = time.perf_counter()
        cov = coverage_tbs(nu, pp, method="gauss_chebyshev" if args.method == "gc"
                           else "alzer", gc_nodes=args.gc_nodes)
        t_an = time.perf_counter() - t0
        t0 = time.perf_counter()
        rec = simulate_records(pp, args.trials, args.seed, workers=args.workers)
        summ = summarize(rec, pp, NomaThresholds.from_db(ef, et), nu_T=nu)
        t_mc = time.perf_counter() - t0
        rows.append([value, cov.value,
                     summ.tbs.coverage.value if summ.tbs.coverage else math.nan,
                     summ.tbs.coverage.se if summ.tbs.coverage else math.nan,
                     t_an, t_mc])
    _write_csv(out_dir / "coverage_tbs.csv",
               ["sweep_value", "P_T_C", "mc_P_T_C", "se_P_T_C",
                "t_analytic_s", "t_mc_s"], rows)
    return 0


def cmd_coverage_noma(params, args, out_dir: Path) -> int:
    rows = []
    for value, (pp, ef, et, _) in _sweep_points(params, args):
        if args.beta is not None:
            pp = pp.replace(beta=args.beta)
        thr = NomaThresholds.from_db(ef, et)
        t0 = time.perf_counter()
        cov = coverage_noma_tier(thr, pp)
        t_an = time.perf_counter() - t0
        t0 = time.perf_counter()
        rec = simulate_records(pp, args.trials, args.seed, workers=args.workers)
        summ = summarize(rec, pp, thr)
        t_mc = time.perf_counter() - t0
        m = summ.abs_tier
        rows.append([value, cov.value,
                     m.coverage.value if m.coverage else math.nan,
                     m.coverage.se if m.coverage else math.nan,
                     m.oma_coverage.value if m.oma_coverage else math.nan,
                     int(cov.feasible), t_an, t_mc])
    _write_csv(out_dir / "coverage_noma.csv",
               ["sweep_value", "P_A_C", "mc_P_A_C", "se_P_A_C", "mc_P_OMA_C",
                "feasible", "t_analytic_s", "t_mc_s"], rows)
    return 0


def cmd_rate(params, args, out_dir: Path) -> int:
    rows = []
    for value, (pp, ef, et, nu_db) in _sweep_points(params, args):
        if args.beta is not None:
            pp = pp.replace(beta=args.beta)
        t0 = time.perf_counter()
        r_t = rate_tbs(pp)
        r_a = rate_noma_tier(pp)
        t_an = time.perf_counter() - t0
        t0 = time.perf_counter()
        rec = simulate_records(pp, args.trials, args.seed, workers=args.workers)
        summ = summarize(rec, pp, NomaThresholds.from_db(ef, et),
                         nu_T=10.0 ** (nu_db / 10.0))
        t_mc = time.perf_counter() - t0
        rows.append([value, r_t, r_a,
                     summ.tbs.rate.value if summ.tbs.rate else math.nan,
                     summ.tbs.rate.se if summ.tbs.rate else math.nan,
                     summ.abs_tier.rate.value if summ.abs_tier.rate else math.nan,
                     summ.abs_tier.rate.se if summ.abs_tier.rate else math.nan,
                     summ.abs_tier.oma_rate.value if summ.abs_tier.oma_rate else math.nan,
                     t_an, t_mc])
    _write_csv(out_dir / "rate.csv",
               ["sweep_value", "R_T", "R_A", "mc_R_T", "se_R_T", "mc_R_A",
                "se_R_A", "mc_R_OMA", "t_analytic_s", "t_mc_s"], rows)
    return 0


def cmd_validate(params, args, out_dir: Path) -> int:
    """Cross-engine agreement at the configured point; nonzero on breach."""
    failures = []
    checks = []
    thr = NomaThresholds.from_db(args.eps_f_db, args.eps_t_db)
    nu = 10.0 ** (args.nu_db / 10.0)

    probs = assoc_all(params)
    rec = simulate_records(params, args.trials, args.seed, workers=args.workers)
    summ = summarize(rec, params, thr, nu_T=nu)

    for name, analytic, est in (
            ("A_T", probs.A_T, summ.tbs.association),
            ("A_L", probs.A_L, summ.los.association),
            ("A_N", probs.A_N, summ.nlos.association)):
        tol = 3.0 * est.se
        checks.append((name, analytic, est.value, tol, abs(analytic - est.value) <= tol))

    cov_t = coverage_tbs(nu, params).value
    checks.append(("P_T_C", cov_t, summ.tbs.coverage.value, 0.03,
                   abs(cov_t - summ.tbs.coverage.value) <= 0.03))
    cov_a = coverage_noma_tier(thr, params).value
    checks.append(("P_A_C", cov_a, summ.abs_tier.coverage.value, 0.03,
                   abs(cov_a - summ.abs_tier.coverage.value) <= 0.03))

    r_t, r_a = rate_tbs(params), rate_noma_tier(params)
    checks.append(("R_T", r_t, summ.tbs.rate.value, 0.05 * abs(r_t),
                   abs(r_t - summ.tbs.rate.value) <= 0.05 * abs(r_t)))
    checks.append(("R_A", r_a, summ.abs_tier.rate.value, 0.07 * abs(r_a),
                   abs(r_a - summ.abs_tier.rate.value) <= 0.07 * abs(r_a)))

    rows = []
    for name, analytic, mc, tol, ok in checks:
        rows.append([name, analytic, mc, tol, "pass" if ok else "FAIL"])
        print(f"{name:6s} analytic={analytic:.6g} mc={mc:.6g} tol={tol:.3g} "
              f"{'pass' if ok else 'FAIL'}")
        if not ok:
            failures.append(name)
    _write_csv(out_dir / "validate.csv",
               ["metric", "analytic", "mc", "tolerance", "status"], rows)
    if failures:
        print(f"validation FAILED for: {', '.join(failures)}", file=sys.stderr)
        return 1
    print("validation passed")
    return 0


_COMMANDS = {
    "association": cmd_association,
    "coverage-tbs": cmd_coverage_tbs,
    "coverage-noma": cmd_coverage_noma,
    "rate": cmd_rate,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavhetnet",
        description="Two-tier UAV/mmWave network evaluator: analytical engine "
                    "with Monte Carlo cross-validation")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", type=Path, default=None,
                        help="YAML scenario file (defaults match the reference scenario)")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory for CSV and manifest")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--sweep", type=str, default=None,
                        help="name=start:stop:step over a scenario field or eps_dB/nu_dB")
    parser.add_argument("--method", choices=("alzer", "gc"), default="alzer",
                        help="mmWave coverage evaluation scheme")
    parser.add_argument("--gc-nodes", type=int, default=50, dest="gc_nodes")
    parser.add_argument("--beta", type=float, default=None,
                        help="override the residual-cancellation coefficient")
    parser.add_argument("--eps-f-db", type=float, default=0.0, dest="eps_f_db")
    parser.add_argument("--eps-t-db", type=float, default=0.0, dest="eps_t_db")
    parser.add_argument("--nu-db", type=float, default=0.0, dest="nu_db")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    params = NetworkParams.from_file(args.config) if args.config else NetworkParams()
    if args.beta is not None and args.command not in ("coverage-noma", "rate"):
        # coverage-noma and rate apply the override per sweep point instead
        params = params.replace(beta=args.beta)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_name, sweep_values = (None, None)
    if args.sweep:
        sweep_name, sweep_values = parse_sweep(args.sweep)
    write_manifest(out_dir / "manifest.txt", args, params, sweep_name, sweep_values)
    return _COMMANDS[args.command](params, args, out_dir)


if __name__ == "__main__":
    sys.exit(main())
