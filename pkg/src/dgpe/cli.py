"""Command-line entry points.

Subcommands: ``ground-state``, ``make-data``, ``evolve``, ``classify``,
``sweep``.  Exit codes: 0 success, 2 solver non-convergence, 3 domain error,
4 missing input file, 5 numerical abort (run halted on a blow-up or
resolution flag).
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import grid as gridmod
from .classifier import (
    ThresholdSet,
    at_threshold_classify,
    below_threshold_membership,
    blowup_delta_default,
    check_blowup_conditions,
    check_scattering_conditions,
    classify_regime,
    trajectory_verdict,
    variance_convexity_threshold,
)
from .datafactory import build_field
from .errors import DomainError, NonConvergenceError, NumericalAbortError
from .functionals import evaluate_bundle
from .groundstate import compute_ground_state
from .io import RunConfig, read_record, write_diagnostics_csv, write_record, write_snapshot
from .propagator import BLOWUP, COMPLETED, UNDERRESOLVED, evolve

EXIT_OK = 0
EXIT_NONCONVERGENCE = 2
EXIT_DOMAIN = 3
EXIT_MISSING_INPUT = 4
EXIT_NUMERICAL = 5


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dgpe",
        description="Pseudospectral dipolar Gross-Pitaevskii toolkit",
    )
    p.add_argument("--config", required=True, help="path to a JSON run config")
    p.add_argument("--out", default=None, help="output directory (overrides config)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: env DGPE_THREADS or all cores)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ground-state", help="compute a ground state and its constants")
    sub.add_parser("make-data", help="materialize the configured initial datum")
    for name in ("evolve", "classify"):
        sp = sub.add_parser(name)
        sp.add_argument("--ground-state", default=None,
                        help="directory holding ground_state.json/.dgpe")
    sub.add_parser("sweep", help="run the configured coupling/amplitude sweep")
    return p


def _load(args):
    try:
        cfg = RunConfig.load(args.config)
    except FileNotFoundError:
        print(f"config not found: {args.config}", file=sys.stderr)
        raise SystemExit(EXIT_MISSING_INPUT)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("DGPE_THREADS", 0)) or -1
    gridmod.set_fft_workers(threads)
    return cfg, threads


def cmd_ground_state(cfg: RunConfig, verbose: bool) -> int:
    regime = classify_regime(cfg.couplings)
    if not regime.unstable:
        print(
            f"couplings ({cfg.couplings.lambda1}, {cfg.couplings.lambda2}) are in the "
            "stable regime: N >= 0 for every field, no admissible minimizer",
            file=sys.stderr,
        )
        return EXIT_DOMAIN
    try:
        rec = compute_ground_state(cfg.grid(), cfg.couplings, cfg.minimizer, cfg.seed)
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except NonConvergenceError as e:
        print(f"did not converge: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    summary_path, snap_path = write_record(cfg.out_dir, rec)
    print(json.dumps(rec.summary(), indent=2, sort_keys=True))
    if verbose:
        print(f"wrote {summary_path} and {snap_path}")
    return EXIT_OK


def cmd_make_data(cfg: RunConfig, gs_dir: str | None, verbose: bool) -> int:
    record = None
    if cfg.data.family == "scaled_ground_state":
        source = gs_dir or cfg.out_dir
        try:
            record = read_record(source)
        except FileNotFoundError as e:
            print(str(e), file=sys.stderr)
            return EXIT_MISSING_INPUT
    try:
        u0 = build_field(cfg.data, cfg.grid(), record)
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "initial_data.dgpe"
    write_snapshot(path, u0, 0.0, cfg.couplings)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_evolve(cfg: RunConfig, gs_dir: str | None, verbose: bool) -> int:
    record = None
    if cfg.data.family == "scaled_ground_state":
        try:
            record = read_record(gs_dir or cfg.out_dir)
        except FileNotFoundError as e:
            print(str(e), file=sys.stderr)
            return EXIT_MISSING_INPUT
    try:
        u0 = build_field(cfg.data, cfg.grid(), record)
        traj = evolve(u0, cfg.couplings, cfg.propagator)
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalAbortError as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "diagnostics.csv"
    write_diagnostics_csv(csv_path, traj)
    for t_snap, fld in traj.snapshots.items():
        write_snapshot(out / f"snapshot_t{t_snap:g}.dgpe", fld, t_snap, cfg.couplings)
    print(f"verdict: {traj.verdict}; {len(traj.rows)} diagnostic rows -> {csv_path}")
    if traj.verdict in (BLOWUP, UNDERRESOLVED):
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_classify(cfg: RunConfig, gs_dir: str | None, verbose: bool) -> int:
    source = gs_dir or cfg.out_dir
    try:
        rec = read_record(source)
    except FileNotFoundError as e:
        print(str(e), file=sys.stderr)
        return EXIT_MISSING_INPUT
    try:
        u0 = build_field(cfg.data, cfg.grid(), rec)
        bundle = evaluate_bundle(u0, cfg.couplings, check_boundary=False)
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    th = ThresholdSet.from_record(rec)
    band = cfg.classifier.strict_band
    regime = classify_regime(cfg.couplings)
    membership = below_threshold_membership(bundle, th, band)
    reports = {
        "regime": {
            "regime": regime.regime,
            "in_negative_interaction_cone": regime.in_cond_gw,
            "margins": regime.margins,
        },
        "membership": {
            "label": membership.label,
            "ambiguous": membership.ambiguous,
        },
        "bundle": {
            "M": bundle.M, "H": bundle.H, "N": bundle.N, "E": bundle.E,
            "G": bundle.G, "V": bundle.V, "Vprime": bundle.Vp,
            "EM": bundle.E * bundle.M, "HM": bundle.H * bundle.M,
            "negNM": -bundle.N * bundle.M,
        },
        "scattering_above_threshold": check_scattering_conditions(
            bundle, th, cfg.couplings, band
        ).to_dict(),
        "variance_blowup": check_blowup_conditions(
            bundle, th, cfg.couplings, band
        ).to_dict(),
    }
    if bundle.E > 0:
        lam0, admissible = variance_convexity_threshold(bundle.E, bundle.M, th.EM)
        reports["variance_convexity_threshold"] = {
            "value": lam0,
            "admissible": admissible,
        }
    em = bundle.E * bundle.M
    if abs(em - th.EM) <= cfg.classifier.at_threshold_band * abs(th.EM):
        reports["at_threshold"] = at_threshold_classify(
            bundle, th, cfg.classifier.at_threshold_band, cfg.couplings
        ).to_dict()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "classification.json"
    path.write_text(json.dumps(reports, indent=2, sort_keys=True))
    predictions = [
        r["prediction"]
        for k, r in reports.items()
        if isinstance(r, dict) and r.get("prediction") not in (None, "none")
    ]
    print(json.dumps(reports, indent=2, sort_keys=True))
    if verbose:
        print(f"wrote {path}; predictions: {predictions or ['none']}")
    return EXIT_OK


def _sweep_row(payload):
    """One sweep row; executed in a worker process."""
    cfg_dict, l1, l2, amp = payload
    cfg = RunConfig.from_dict(cfg_dict)
    from .functionals import CouplingParams

    cp = CouplingParams(l1, l2)
    row = {"lambda1": l1, "lambda2": l2, "amplitude": amp}
    try:
        regime = classify_regime(cp)
        row["regime"] = regime.regime
        row["in_negative_interaction_cone"] = regime.in_cond_gw
        spec = cfg.data
        params = dict(spec.params)
        if "amp" in params:
            params["amp"] = params["amp"] * amp
        u0 = build_field(type(spec)(spec.family, params), cfg.grid(), None)
        bundle = evaluate_bundle(u0, cp, check_boundary=False)
        if not regime.unstable:
            predicted = "scatter"
        elif bundle.E < 0.0 and np.isfinite(bundle.V):
            predicted = "blowup"
        else:
            predicted = "unknown"
        row["predicted"] = predicted
        traj = evolve(u0, cp, cfg.propagator)
        if traj.verdict == BLOWUP:
            empirical = "blowup"
        elif traj.verdict == COMPLETED:
            empirical = "completed"
        else:
            empirical = traj.verdict
        row["empirical"] = empirical
        agree = (
            "n/a"
            if predicted == "unknown"
            else str(
                (predicted == "blowup" and empirical == "blowup")
                or (predicted == "scatter" and empirical == "completed")
            ).lower()
        )
        row["agreement"] = agree
        row["status"] = "ok"
    except Exception as e:  # per-row failures recorded, not fatal
        row["status"] = f"error: {e}"
        row.setdefault("predicted", "")
        row.setdefault("empirical", "")
        row.setdefault("agreement", "")
        row.setdefault("regime", "")
        row.setdefault("in_negative_interaction_cone", "")
    return row


SWEEP_COLUMNS = [
    "lambda1", "lambda2", "amplitude", "regime",
    "in_negative_interaction_cone", "predicted", "empirical", "agreement", "status",
]


def cmd_sweep(cfg: RunConfig, threads: int, verbose: bool) -> int:
    if cfg.sweep is None:
        print("config has no sweep section", file=sys.stderr)
        return EXIT_DOMAIN
    l1s = cfg.sweep.lambda1 or (cfg.couplings.lambda1,)
    l2s = cfg.sweep.lambda2 or (cfg.couplings.lambda2,)
    amps = cfg.sweep.amplitudes or (1.0,)
    jobs = [
        (cfg.to_dict(), l1, l2, amp)
        for l1, l2, amp in itertools.product(l1s, l2s, amps)
    ]
    workers = threads if threads and threads > 0 else (os.cpu_count() or 1)
    workers = min(workers, len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = out / "sweep.csv"
    import csv as _csv

    with open(table, "w", newline="") as fh:
        w = _csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: row.get(k, "") for k in SWEEP_COLUMNS})
    ok = sum(1 for r in rows if r["status"] == "ok")
    print(f"{ok}/{len(rows)} rows succeeded -> {table}")
    return EXIT_OK if ok > 0 else EXIT_NUMERICAL


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cfg, threads = _load(args)
    if args.command == "ground-state":
        return cmd_ground_state(cfg, args.verbose)
    if args.command == "make-data":
        return cmd_make_data(cfg, getattr(args, "ground_state", None), args.verbose)
    if args.command == "evolve":
        return cmd_evolve(cfg, getattr(args, "ground_state", None), args.verbose)
    if args.command == "classify":
        return cmd_classify(cfg, getattr(args, "ground_state", None), args.verbose)
    if args.command == "sweep":
        return cmd_sweep(cfg, threads, args.verbose)
    raise AssertionError(args.command)


if __name__ == "__main__":
    raise SystemExit(main())
