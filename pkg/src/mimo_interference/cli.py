"""
Command-line interface.

Subcommands: ``roc``, ``heatmap``, ``oip``, ``validate-special-cases`` and
``theory``. Exit codes: 0 success, 1 failed validation, 2 configuration
error, 3 numerical degeneracy, 4 I/O error.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .errors import (
    ConfigError,
    DegenerateGeometryError,
    ModelError,
    OverdeterminedInterferenceError,
    SingularSubspaceError,
)
from .output import emit
from .reductions import SpecialCase, special_case_scenario, validate_special_case
from .scenario import Mode, load_scenario
from .theory import curve

log = logging.getLogger("mimo_interference")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_IO = 0, 1, 2, 3, 4
DEFAULT_CONFIG = {
    "roc": "synthetic_reference.json",
    "theory": "synthetic_reference.json",
    "heatmap": "realistic_reference.json",
    "oip": "realistic_reference.json",
}


def _detectors(text, allowed):
    names = [d.strip().lower() for d in text.split(",") if d.strip()]
    bad = [d for d in names if d not in allowed]
    if bad or not names:
        raise ConfigError(f"unknown detector(s) {bad or text!r}; choose from {', '.join(allowed)}", key="detectors")
    return tuple(names)


def _load(args):
    cfg = load_scenario(args.config or DEFAULT_CONFIG[args.command])
    return cfg.with_overrides(seed=args.seed, trials=args.trials)


def _out(args, name):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / f"{name}.{args.format}"


def cmd_roc(args):
    cfg = _load(args)
    if args.sigma2_pert is not None:
        cfg = cfg.with_overrides(sigma2_pert=args.sigma2_pert)
    dets = _detectors(args.detectors, ex.ALL_DETECTORS)
    curves = ex.run_roc(cfg, dets, workers=args.workers)
    for c in curves:
        log.info(
            "%-11s INR %6.1f dB  lambda %7.3f  max|pd_emp - pd_th| %.4f  P_D@0.1 %.3f",
            c.detector, c.inr_db, c.lam, np.abs(c.pd_empirical - c.pd_theory).max(), c.pd_at_pfa(0.1),
        )
    for p in emit(curves, args.format, _out(args, "roc")):
        print(p)
    return EXIT_OK


def cmd_theory(args):
    cfg = _load(args)
    if cfg.mode is not Mode.SYNTHETIC:
        raise ConfigError("theory curves need a SYNTHETIC scenario", key="mode")
    dets = _detectors(args.detectors, ex.ALL_DETECTORS)
    curves = []
    for inr in cfg.inr_db:
        for d in dets:
            curves.append(curve(d, cfg.noncentrality(d, inr), cfg.pfa_grid()))
    for p in emit(curves, args.format, _out(args, "theory")):
        print(p)
    return EXIT_OK


def cmd_heatmap(args):
    cfg = _load(args)
    dets = _detectors(args.detectors, ex.ALL_DETECTORS + (ex.BASELINE,))
    angles = None
    if args.angle_points:
        angles = np.linspace(-90, 90, args.angle_points + 2)[1:-1]
    grids = ex.run_heatmap(cfg, dets, args.doppler_bin, angles)
    for p in emit(grids, args.format, Path(args.out) / "heatmap"):
        print(p)
    return EXIT_OK


def cmd_oip(args):
    cfg = _load(args)
    dets = _detectors(args.detectors, ex.ALL_DETECTORS + (ex.BASELINE,))
    runs = args.runs if args.runs is not None else args.trials
    res = ex.run_oip(cfg, runs, dets, workers=args.workers)
    for d, row in res.cdf_table((50, 80)).items():
        log.info("%-11s median %6.2f dB  80th pct %6.2f dB", d, row[50], row[80])
    for p in emit(res, args.format, _out(args, "oip")):
        print(p)
    return EXIT_OK


def cmd_validate(args):
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    ok = True
    rows = []
    for mode in SpecialCase:
        for K in args.K:
            rep = validate_special_case(mode, special_case_scenario(mode, K, rng))
            ok &= rep.passed
            rows.append((mode.value, K, rep.max_rel_deviation, rep.passed))
            print(f"{mode.value:9s} K={K:<4d} max rel deviation {rep.max_rel_deviation:.3e}  "
                  f"{'PASS' if rep.passed else 'FAIL'}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        lines = ["mode,K,max_rel_deviation,passed"] + [f"{m},{k},{d!r},{p}" for m, k, d, p in rows]
        (out / "special_cases.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(
        prog="mimo-interference",
        description="MIMO-FMCW interference simulation and detector evaluation.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON (or a bundled scenario name)")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--trials", type=int, help="override the number of trials / runs")
    common.add_argument("--out", default="out", help="output directory (default: ./out)")
    common.add_argument("--format", choices=("csv", "svg"), default="csv")
    common.add_argument("--detectors", default="clairvoyant,rs,lcmv,gs",
                        help="comma-separated subset of clairvoyant,rs,lcmv,gs (heatmap/oip also accept fft)")
    common.add_argument("--workers", type=int, default=None, help="worker threads")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("roc", parents=[common], help="Monte Carlo ROC curves (synthetic)")
    s.add_argument("--sigma2-pert", type=float, help="covariance perturbation variance")
    s.set_defaults(func=cmd_roc)

    s = sub.add_parser("theory", parents=[common], help="analytical ROC curves only")
    s.set_defaults(func=cmd_theory)

    s = sub.add_parser("heatmap", parents=[common], help="range-angle heatmaps (realistic)")
    s.add_argument("--doppler-bin", type=int, help="fixed Doppler bin (default: object's bin)")
    s.add_argument("--angle-points", type=int, help="use a uniform angle grid of this size")
    s.set_defaults(func=cmd_heatmap)

    s = sub.add_parser("oip", parents=[common], help="output interference power CDFs (realistic)")
    s.add_argument("--runs", type=int, help="number of randomized runs")
    s.set_defaults(func=cmd_oip)

    s = sub.add_parser("validate-special-cases", parents=[common],
                       help="coherent / phased-array / TDM reductions of the interference model")
    s.add_argument("--K", type=int, nargs="+", default=[16, 64, 256], help="pulse counts to check")
    s.set_defaults(func=cmd_validate, out=None)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if args.command != "validate-special-cases" and args.verbose is False:
        log.setLevel(logging.INFO)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateGeometryError, SingularSubspaceError, OverdeterminedInterferenceError) as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ModelError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
